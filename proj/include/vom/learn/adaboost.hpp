#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vom/learn/preprocess.hpp"

namespace vom::learn {

struct Stump {
  int feature = 0;
  double threshold = 0;
  int polarity = 1;  // +1: predict +1 when x[f] >= threshold

  int predict(const std::vector<double>& x) const {
    return (x[static_cast<std::size_t>(feature)] >= threshold ? 1 : -1) * polarity;
  }
};

// Discrete boosting over axis-aligned threshold stumps.
class AdaBoost {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, int rounds) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("AdaBoost::fit: bad data");
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    stumps_.clear();
    alphas_.clear();
    loss_bound_.clear();
    double bound = 1.0;

    // per-feature sorted orders, reused every round
    std::vector<std::vector<int>> order(d, std::vector<int>(n));
    for (std::size_t j = 0; j < d; ++j) {
      std::iota(order[j].begin(), order[j].end(), 0);
      std::stable_sort(order[j].begin(), order[j].end(),
                       [&](int a, int b) { return x[static_cast<std::size_t>(a)][j] < x[static_cast<std::size_t>(b)][j]; });
    }

    for (int t = 0; t < rounds; ++t) {
      Stump best;
      double best_err = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        // error of "predict +1 everywhere" as the running baseline, then
        // sweep thresholds between consecutive sorted values
        double err_plus = 0;  // stump: +1 if x >= thr, with thr below min
        for (std::size_t i = 0; i < n; ++i)
          if (y[i] == -1) err_plus += w[i];
        auto consider = [&](double err, double thr) {
          double e = err, pol = 1;
          if (e > 0.5) {
            e = 1.0 - e;
            pol = -1;
          }
          if (e < best_err) {
            best_err = e;
            best.feature = static_cast<int>(j);
            best.threshold = thr;
            best.polarity = static_cast<int>(pol);
          }
        };
        double lowest = x[static_cast<std::size_t>(order[j][0])][j];
        consider(err_plus, lowest - 1.0);
        double err = err_plus;
        for (std::size_t k = 0; k < n; ++k) {
          int i = order[j][k];
          // moving threshold above x_i flips its prediction from +1 to -1
          err += y[static_cast<std::size_t>(i)] == 1 ? w[static_cast<std::size_t>(i)]
                                                     : -w[static_cast<std::size_t>(i)];
          double here = x[static_cast<std::size_t>(i)][j];
          double next = k + 1 < n ? x[static_cast<std::size_t>(order[j][k + 1])][j] : here + 1.0;
          if (next == here) continue;
          consider(err, (here + next) / 2.0);
        }
      }

      double e = std::clamp(best_err, 1e-12, 1.0 - 1e-12);
      double alpha = 0.5 * std::log((1.0 - e) / e);
      stumps_.push_back(best);
      alphas_.push_back(alpha);
      bound *= 2.0 * std::sqrt(e * (1.0 - e));
      loss_bound_.push_back(bound);

      double z = 0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] *= std::exp(-alpha * y[i] * best.predict(x[i]));
        z += w[i];
      }
      for (auto& v : w) v /= z;
      if (e < 1e-10) break;  // perfectly separated
    }
  }

  double decision(const std::vector<double>& x) const {
    double acc = 0;
    for (std::size_t t = 0; t < stumps_.size(); ++t) acc += alphas_[t] * stumps_[t].predict(x);
    return acc;
  }

  int predict(const std::vector<double>& x) const { return decision(x) >= 0 ? 1 : -1; }

  // Exponential-loss bound (product of per-round normalizers), one entry
  // per round; non-increasing whenever the weak learner beats chance.
  const std::vector<double>& loss_bound() const { return loss_bound_; }
  const std::vector<Stump>& stumps() const { return stumps_; }
  const std::vector<double>& alphas() const { return alphas_; }

  std::vector<double> feature_alpha_sums(std::size_t dims) const {
    std::vector<double> acc(dims, 0.0);
    for (std::size_t t = 0; t < stumps_.size(); ++t)
      acc[static_cast<std::size_t>(stumps_[t].feature)] += std::abs(alphas_[t]);
    return acc;
  }

 private:
  std::vector<Stump> stumps_;
  std::vector<double> alphas_;
  std::vector<double> loss_bound_;
};

}  // namespace vom::learn
