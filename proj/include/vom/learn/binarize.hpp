#pragma once

#include <stdexcept>
#include <string>

namespace vom::learn {

// The two ways the 5-degree answers collapse to binary classes; they
// differ only in where degree 3 lands.
enum class GroupingCase {
  low123_high45 = 1,
  low12_high345 = 2,
};

inline GroupingCase grouping_from(int n) {
  if (n == 1) return GroupingCase::low123_high45;
  if (n == 2) return GroupingCase::low12_high345;
  throw std::invalid_argument("grouping case must be 1 or 2, got " + std::to_string(n));
}

// Returns -1 (low) or +1 (high).
inline int binarize(int label, GroupingCase grouping) {
  if (label < 1 || label > 5)
    throw std::invalid_argument("label outside [1,5]: " + std::to_string(label));
  int cut = grouping == GroupingCase::low123_high45 ? 3 : 2;
  return label <= cut ? -1 : 1;
}

}  // namespace vom::learn
