#pragma once

#include <array>
#include <cmath>
#include <string>

namespace vom::ind {

inline constexpr int kFeatureCount = 36;

// Feature indices (0-based) into BehaviorVector::values. Layout is fixed;
// report files and classifiers rely on it.
namespace feat {
inline constexpr int role = 0;                 // this party's role code {1,2}
inline constexpr int looks_other = 1;          // gaze time %
inline constexpr int other_looks = 2;
inline constexpr int looks_mediator = 3;
inline constexpr int mediator_looks = 4;
inline constexpr int posture = 5;              // {1,2,3}
inline constexpr int gender_mediator = 6;
inline constexpr int gender_party = 7;
inline constexpr int gender_other = 8;
inline constexpr int age_mediator = 9;
inline constexpr int age_party = 10;
inline constexpr int age_other = 11;
inline constexpr int session_type = 12;        // individual=1, joint=2
inline constexpr int body_agitation = 13;
inline constexpr int body_agitation_at_other = 14;
inline constexpr int body_agitation_at_mediator = 15;
inline constexpr int hand_agitation = 16;
inline constexpr int hand_agitation_at_other = 17;
inline constexpr int hand_agitation_at_mediator = 18;
inline constexpr int mediator_hand_agitation_at_party = 19;
inline constexpr int other_hand_agitation_at_party = 20;
inline constexpr int hands_together = 21;      // time %
inline constexpr int hands_touch_face = 22;    // mean distance, mm
inline constexpr int hands_under_table = 23;   // time %
inline constexpr int speak_time_mediator = 24;
inline constexpr int speak_time_party = 25;
inline constexpr int speak_time_other = 26;
inline constexpr int turns_mediator = 27;
inline constexpr int turns_party = 28;
inline constexpr int turns_other = 29;
inline constexpr int mediator_interrupts_party = 30;
inline constexpr int party_interrupts_mediator = 31;
inline constexpr int party_interrupts_other = 32;
inline constexpr int other_interrupts_party = 33;
inline constexpr int nervous_begin = 34;       // survey, [1,5]
inline constexpr int nervous_end = 35;
}  // namespace feat

// The 36 behavioral descriptors for one party-sample. Missing entries
// (undefined averages, no table plane, ...) hold NaN until imputation.
struct BehaviorVector {
  std::array<double, kFeatureCount> values{};

  BehaviorVector() { values.fill(std::nan("")); }

  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  bool missing(int i) const { return std::isnan(values[static_cast<std::size_t>(i)]); }

  int missing_count() const {
    int n = 0;
    for (double v : values) n += std::isnan(v) ? 1 : 0;
    return n;
  }
};

inline const char* feature_name(int i) {
  static const char* names[kFeatureCount] = {
      "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12",
      "f13", "f14", "f15", "f16", "f17", "f18", "f19", "f20", "f21", "f22", "f23",
      "f24", "f25", "f26", "f27", "f28", "f29", "f30", "f31", "f32", "f33", "f34",
      "f35", "f36"};
  return names[i];
}

struct LabeledSample {
  std::string session_id;
  std::string party_id;
  BehaviorVector features;
  int receptivity = 0;   // [1,5], per party
  int agreement = 0;     // [1,5], shared across a session's parties
  int satisfaction = 0;  // [1,5], shared across a session's parties
};

}  // namespace vom::ind
