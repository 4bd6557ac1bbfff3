#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vom::learn {

using Matrix = std::vector<std::vector<double>>;

// Column means over the finite entries; NaN cells take the training mean.
// Columns with no finite training value fall back to zero.
class Imputer {
 public:
  void fit(const Matrix& train) {
    if (train.empty()) throw std::invalid_argument("Imputer::fit: empty training set");
    std::size_t d = train[0].size();
    means_.assign(d, 0.0);
    std::vector<int> counts(d, 0);
    for (const auto& row : train)
      for (std::size_t j = 0; j < d; ++j)
        if (std::isfinite(row[j])) {
          means_[j] += row[j];
          ++counts[j];
        }
    for (std::size_t j = 0; j < d; ++j) means_[j] = counts[j] > 0 ? means_[j] / counts[j] : 0.0;
  }

  std::vector<double> apply(const std::vector<double>& row) const {
    std::vector<double> out(row);
    for (std::size_t j = 0; j < out.size(); ++j)
      if (!std::isfinite(out[j])) out[j] = means_[j];
    return out;
  }

  Matrix apply(const Matrix& rows) const {
    Matrix out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(apply(r));
    return out;
  }

  bool has_missing(const Matrix& rows) const {
    for (const auto& r : rows)
      for (double v : r)
        if (!std::isfinite(v)) return true;
    return false;
  }

 private:
  std::vector<double> means_;
};

// Per-column z-scoring fitted on the training fold.
class Standardizer {
 public:
  void fit(const Matrix& train) {
    if (train.empty()) throw std::invalid_argument("Standardizer::fit: empty training set");
    std::size_t d = train[0].size();
    means_.assign(d, 0.0);
    stds_.assign(d, 0.0);
    for (const auto& row : train)
      for (std::size_t j = 0; j < d; ++j) means_[j] += row[j];
    for (auto& m : means_) m /= static_cast<double>(train.size());
    for (const auto& row : train)
      for (std::size_t j = 0; j < d; ++j) {
        double dd = row[j] - means_[j];
        stds_[j] += dd * dd;
      }
    for (auto& s : stds_) {
      s = std::sqrt(s / static_cast<double>(train.size()));
      if (s < 1e-9) s = 1.0;  // constant column
    }
  }

  std::vector<double> apply(const std::vector<double>& row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - means_[j]) / stds_[j];
    return out;
  }

  Matrix apply(const Matrix& rows) const {
    Matrix out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(apply(r));
    return out;
  }

 private:
  std::vector<double> means_, stds_;
};

}  // namespace vom::learn
