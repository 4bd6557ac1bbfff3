#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "vom/learn/preprocess.hpp"
#include "vom/util.hpp"

namespace vom::learn {

inline double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b,
                         double gamma) {
  double d2 = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = a[j] - b[j];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

// C-SVM with an RBF kernel solved by sequential minimal optimization
// (random second-choice working set, seeded).
class SvmRbf {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, double cost, double gamma,
           std::uint64_t seed, double tol = 1e-3, int max_passes = 5) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("SvmRbf::fit: bad data");
    x_ = x;
    y_ = y;
    gamma_ = gamma;
    const std::size_t n = x.size();
    alpha_.assign(n, 0.0);
    bias_ = 0;

    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) k[i][j] = k[j][i] = rbf_kernel(x[i], x[j], gamma);

    auto decision_at = [&](std::size_t i) {
      double s = bias_;
      for (std::size_t t = 0; t < n; ++t) s += alpha_[t] * y_[t] * k[t][i];
      return s;
    };

    auto rng = make_rng(seed, 0x5B);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    int passes = 0;
    while (passes < max_passes) {
      int changed = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double ei = decision_at(i) - y_[i];
        bool violates = (y_[i] * ei < -tol && alpha_[i] < cost) ||
                        (y_[i] * ei > tol && alpha_[i] > 0);
        if (!violates) continue;
        std::size_t j = pick(rng);
        while (j == i) j = pick(rng);
        double ej = decision_at(j) - y_[j];
        double ai_old = alpha_[i], aj_old = alpha_[j];
        double lo, hi;
        if (y_[i] != y_[j]) {
          lo = std::max(0.0, aj_old - ai_old);
          hi = std::min(cost, cost + aj_old - ai_old);
        } else {
          lo = std::max(0.0, ai_old + aj_old - cost);
          hi = std::min(cost, ai_old + aj_old);
        }
        if (lo >= hi) continue;
        double eta = 2 * k[i][j] - k[i][i] - k[j][j];
        if (eta >= 0) continue;
        double aj = std::clamp(aj_old - y_[j] * (ei - ej) / eta, lo, hi);
        if (std::abs(aj - aj_old) < 1e-7) continue;
        double ai = ai_old + y_[i] * y_[j] * (aj_old - aj);
        alpha_[i] = ai;
        alpha_[j] = aj;
        double b1 = bias_ - ei - y_[i] * (ai - ai_old) * k[i][i] - y_[j] * (aj - aj_old) * k[i][j];
        double b2 = bias_ - ej - y_[i] * (ai - ai_old) * k[i][j] - y_[j] * (aj - aj_old) * k[j][j];
        if (ai > 0 && ai < cost) bias_ = b1;
        else if (aj > 0 && aj < cost) bias_ = b2;
        else bias_ = (b1 + b2) / 2;
        ++changed;
      }
      passes = changed == 0 ? passes + 1 : 0;
    }
  }

  double decision(const std::vector<double>& x) const {
    double s = bias_;
    for (std::size_t t = 0; t < x_.size(); ++t)
      if (alpha_[t] > 0) s += alpha_[t] * y_[t] * rbf_kernel(x_[t], x, gamma_);
    return s;
  }

  int predict(const std::vector<double>& x) const { return decision(x) >= 0 ? 1 : -1; }

 private:
  Matrix x_;
  std::vector<int> y_;
  std::vector<double> alpha_;
  double bias_ = 0, gamma_ = 1;
};

// epsilon-SVR in the beta = alpha - alpha* parameterization: maximize
//   W(b) = -1/2 b'Kb + b'y - eps*|b|_1   s.t.  sum b = 0, |b_i| <= C
// by exact pairwise coordinate moves over sign regions.
class SvrRbf {
 public:
  void fit(const Matrix& x, const std::vector<double>& y, double cost, double gamma,
           double epsilon, int max_sweeps = 60, double min_gain = 1e-9) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("SvrRbf::fit: bad data");
    x_ = x;
    gamma_ = gamma;
    const std::size_t n = x.size();
    beta_.assign(n, 0.0);

    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) k[i][j] = k[j][i] = rbf_kernel(x[i], x[j], gamma);

    auto objective = [&] {
      double quad = 0, lin = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) quad += beta_[i] * beta_[j] * k[i][j];
        lin += beta_[i] * y[i] - epsilon * std::abs(beta_[i]);
      }
      return -0.5 * quad + lin;
    };

    double current = objective();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double gained = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          double s = beta_[i] + beta_[j];
          double lo = std::max(-cost, s - cost), hi = std::min(cost, s + cost);
          if (lo > hi) continue;
          double eta = k[i][i] + k[j][j] - 2 * k[i][j];
          // residual sums excluding i and j
          double ri = 0, rj = 0;
          for (std::size_t t = 0; t < n; ++t) {
            if (t == i || t == j) continue;
            ri += beta_[t] * k[t][i];
            rj += beta_[t] * k[t][j];
          }
          // candidate optima per sign region of (beta_i, s - beta_i)
          double best_b = beta_[i], best_w = eval_pair(beta_[i], s, k[i][i], k[j][j], k[i][j],
                                                       ri, rj, y[i], y[j], epsilon);
          auto try_candidate = [&](double b) {
            b = std::clamp(b, lo, hi);
            double w = eval_pair(b, s, k[i][i], k[j][j], k[i][j], ri, rj, y[i], y[j], epsilon);
            if (w > best_w + 1e-15) {
              best_w = w;
              best_b = b;
            }
          };
          if (eta > 1e-12)
            for (double si : {-1.0, 1.0})
              for (double sj : {-1.0, 1.0}) {
                double numer =
                    s * (k[j][j] - k[i][j]) - ri + rj + y[i] - y[j] - epsilon * (si - sj);
                try_candidate(numer / eta);
              }
          try_candidate(0.0);
          try_candidate(s);
          try_candidate(lo);
          try_candidate(hi);
          if (best_b != beta_[i]) {
            double before = eval_pair(beta_[i], s, k[i][i], k[j][j], k[i][j], ri, rj, y[i],
                                      y[j], epsilon);
            beta_[i] = best_b;
            beta_[j] = s - best_b;
            gained += best_w - before;
          }
        }
      current += gained;
      if (gained < min_gain) break;
    }

    // bias from the free support vectors, fallback to the median residual
    std::vector<double> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(beta_[i]) < 1e-9 || std::abs(beta_[i]) > cost - 1e-9) continue;
      double f = 0;
      for (std::size_t t = 0; t < n; ++t) f += beta_[t] * k[t][i];
      candidates.push_back(y[i] - f - epsilon * (beta_[i] > 0 ? 1.0 : -1.0));
    }
    if (candidates.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        double f = 0;
        for (std::size_t t = 0; t < n; ++t) f += beta_[t] * k[t][i];
        candidates.push_back(y[i] - f);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    bias_ = candidates[candidates.size() / 2];
  }

  double predict(const std::vector<double>& x) const {
    double s = bias_;
    for (std::size_t t = 0; t < x_.size(); ++t)
      if (beta_[t] != 0) s += beta_[t] * rbf_kernel(x_[t], x, gamma_);
    return s;
  }

 private:
  // W restricted to the pair, dropping terms that do not involve it.
  static double eval_pair(double bi, double s, double kii, double kjj, double kij, double ri,
                          double rj, double yi, double yj, double eps) {
    double bj = s - bi;
    double quad = 0.5 * (bi * bi * kii + bj * bj * kjj) + bi * bj * kij;
    double cross = bi * ri + bj * rj;
    return -quad - cross + bi * yi + bj * yj - eps * (std::abs(bi) + std::abs(bj));
  }

  Matrix x_;
  std::vector<double> beta_;
  double bias_ = 0, gamma_ = 1;
};

}  // namespace vom::learn
