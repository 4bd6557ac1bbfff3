#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "vom/util.hpp"

namespace vom::math {

inline double log_sum_exp(const std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Diagonal-covariance Gaussian mixture fit by EM with seeded k-means++
// initialization. Deterministic given (data, components, seed).
class DiagGmm {
 public:
  int components() const { return static_cast<int>(weights_.size()); }
  int dims() const { return weights_.empty() ? 0 : static_cast<int>(means_[0].size()); }
  const std::vector<std::vector<double>>& means() const { return means_; }
  const std::vector<std::vector<double>>& variances() const { return vars_; }
  const std::vector<double>& weights() const { return weights_; }

  static DiagGmm fit(const std::vector<std::vector<double>>& data, int components,
                     std::uint64_t seed, double tol = 1e-4, int max_iters = 200,
                     double var_floor = 1e-6) {
    if (data.empty()) throw std::invalid_argument("DiagGmm::fit: empty data");
    int n = static_cast<int>(data.size());
    int d = static_cast<int>(data[0].size());
    components = std::min(components, n);

    DiagGmm g;
    g.means_ = kmeanspp(data, components, seed);
    components = static_cast<int>(g.means_.size());
    g.vars_.assign(components, std::vector<double>(d, 0.0));
    g.weights_.assign(components, 1.0 / components);

    // k-means assignment for initial variances
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 20; ++iter) {
      bool moved = false;
      for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < components; ++k) {
          double dist = sq_dist(data[i], g.means_[k]);
          if (dist < best_d) best_d = dist, best = k;
        }
        if (assign[i] != best) assign[i] = best, moved = true;
      }
      std::vector<std::vector<double>> sums(components, std::vector<double>(d, 0.0));
      std::vector<int> counts(components, 0);
      for (int i = 0; i < n; ++i) {
        ++counts[assign[i]];
        for (int j = 0; j < d; ++j) sums[assign[i]][j] += data[i][j];
      }
      for (int k = 0; k < components; ++k)
        if (counts[k] > 0)
          for (int j = 0; j < d; ++j) g.means_[k][j] = sums[k][j] / counts[k];
      if (!moved) break;
    }
    for (int k = 0; k < components; ++k) {
      std::vector<double> var(d, 0.0);
      int cnt = 0;
      for (int i = 0; i < n; ++i) {
        if (assign[i] != k) continue;
        ++cnt;
        for (int j = 0; j < d; ++j) {
          double dd = data[i][j] - g.means_[k][j];
          var[j] += dd * dd;
        }
      }
      for (int j = 0; j < d; ++j)
        g.vars_[k][j] = std::max(cnt > 1 ? var[j] / cnt : global_var(data, j), var_floor);
      g.weights_[k] = std::max(cnt, 1) / static_cast<double>(n);
    }
    normalize(g.weights_);

    // EM
    std::vector<std::vector<double>> resp(n, std::vector<double>(components));
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
      double ll = 0;
      for (int i = 0; i < n; ++i) {
        std::vector<double> lp(components);
        for (int k = 0; k < components; ++k)
          lp[k] = std::log(g.weights_[k]) + g.log_gauss(data[i], k);
        double lse = log_sum_exp(lp);
        ll += lse;
        for (int k = 0; k < components; ++k) resp[i][k] = std::exp(lp[k] - lse);
      }
      for (int k = 0; k < components; ++k) {
        double nk = 0;
        std::vector<double> mu(d, 0.0), var(d, 0.0);
        for (int i = 0; i < n; ++i) {
          nk += resp[i][k];
          for (int j = 0; j < d; ++j) mu[j] += resp[i][k] * data[i][j];
        }
        nk = std::max(nk, 1e-10);
        for (int j = 0; j < d; ++j) mu[j] /= nk;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < d; ++j) {
            double dd = data[i][j] - mu[j];
            var[j] += resp[i][k] * dd * dd;
          }
        for (int j = 0; j < d; ++j) g.vars_[k][j] = std::max(var[j] / nk, var_floor);
        g.means_[k] = mu;
        g.weights_[k] = nk / n;
      }
      normalize(g.weights_);
      if (std::abs(ll - prev_ll) < tol * std::abs(ll)) break;
      prev_ll = ll;
    }
    return g;
  }

  double log_pdf(const std::vector<double>& x) const {
    std::vector<double> lp(components());
    for (int k = 0; k < components(); ++k)
      lp[k] = std::log(weights_[k]) + log_gauss(x, k);
    return log_sum_exp(lp);
  }

  double log_gauss(const std::vector<double>& x, int k) const {
    constexpr double kLog2Pi = 1.8378770664093453;
    double acc = 0;
    const auto& mu = means_[k];
    const auto& var = vars_[k];
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double dd = x[j] - mu[j];
      acc += dd * dd / var[j] + std::log(var[j]) + kLog2Pi;
    }
    return -0.5 * acc;
  }

 private:
  static double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double d = a[i] - b[i];
      s += d * d;
    }
    return s;
  }

  static double global_var(const std::vector<std::vector<double>>& data, int j) {
    double mean = 0;
    for (const auto& r : data) mean += r[j];
    mean /= data.size();
    double v = 0;
    for (const auto& r : data) v += (r[j] - mean) * (r[j] - mean);
    return std::max(v / data.size(), 1e-6);
  }

  static void normalize(std::vector<double>& w) {
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;
  }

  static std::vector<std::vector<double>> kmeanspp(const std::vector<std::vector<double>>& data,
                                                   int k, std::uint64_t seed) {
    auto rng = vom::make_rng(seed, 0x6b6d); // "km" stream
    std::vector<std::vector<double>> centers;
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    centers.push_back(data[pick(rng)]);
    std::vector<double> d2(data.size());
    while (static_cast<int>(centers.size()) < k) {
      double total = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) best = std::min(best, sq_dist(data[i], c));
        d2[i] = best;
        total += best;
      }
      if (total <= 0) break;  // all remaining points coincide with centers
      std::uniform_real_distribution<double> u(0, total);
      double r = u(rng), acc = 0;
      std::size_t chosen = data.size() - 1;
      for (std::size_t i = 0; i < data.size(); ++i) {
        acc += d2[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
      centers.push_back(data[chosen]);
    }
    return centers;
  }

  std::vector<std::vector<double>> means_, vars_;
  std::vector<double> weights_;
};

}  // namespace vom::math
