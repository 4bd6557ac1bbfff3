#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vom/learn/preprocess.hpp"
#include "vom/math/gmm.hpp"

namespace vom::learn {

// Probabilistic neural network: Parzen kernel density per class with a
// shared spread; log-sum-exp keeps the tiny-spread regime (effectively
// nearest-neighbor) numerically exact.
class Pnn {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, double spread) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("Pnn::fit: bad data");
    spread_ = spread;
    pos_.clear();
    neg_.clear();
    for (std::size_t i = 0; i < x.size(); ++i) (y[i] > 0 ? pos_ : neg_).push_back(x[i]);
    if (pos_.empty() || neg_.empty())
      throw std::invalid_argument("Pnn::fit: both classes must be present");
  }

  double decision(const std::vector<double>& x) const {
    return class_log_density(pos_, x) - class_log_density(neg_, x);
  }

  int predict(const std::vector<double>& x) const { return decision(x) >= 0 ? 1 : -1; }

 private:
  double class_log_density(const Matrix& members, const std::vector<double>& x) const {
    std::vector<double> logs;
    logs.reserve(members.size());
    for (const auto& m : members) {
      double d2 = 0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        double d = x[j] - m[j];
        d2 += d * d;
      }
      logs.push_back(-d2 / (2.0 * spread_ * spread_));
    }
    return math::log_sum_exp(logs) - std::log(static_cast<double>(members.size()));
  }

  Matrix pos_, neg_;
  double spread_ = 0.1;
};

}  // namespace vom::learn
