#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "vom/learn/preprocess.hpp"
#include "vom/util.hpp"

namespace vom::learn {

// Single-hidden-layer tanh network trained by damped least squares
// (Levenberg-Marquardt). The cascade variant adds input-to-output skip
// connections; everything else is shared.
class FeedForwardNet {
 public:
  FeedForwardNet(int hidden, bool cascade) : hidden_(hidden), cascade_(cascade) {}

  void fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed, int max_iters = 60) {
    std::vector<double> targets(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) targets[i] = y[i];
    fit_regression(x, targets, seed, max_iters);
  }

  void fit_regression(const Matrix& x, const std::vector<double>& y, std::uint64_t seed,
                      int max_iters = 60) {
    if (x.empty() || x.size() != y.size())
      throw std::invalid_argument("FeedForwardNet::fit: bad data");
    dims_ = static_cast<int>(x[0].size());
    const int n = static_cast<int>(x.size());
    const int p = param_count();
    theta_.resize(p);
    auto rng = make_rng(seed, cascade_ ? 0xCF : 0xFF);
    std::normal_distribution<double> init(0.0, 0.5 / std::sqrt(static_cast<double>(dims_)));
    for (auto& v : theta_) v = init(rng);

    Eigen::MatrixXd jac(n, p);
    Eigen::VectorXd residual(n);
    double mu = 1e-2;
    double sse = compute(x, y, &jac, &residual);
    for (int iter = 0; iter < max_iters; ++iter) {
      Eigen::MatrixXd h = jac.transpose() * jac;
      Eigen::VectorXd g = jac.transpose() * residual;
      if (g.lpNorm<Eigen::Infinity>() < 1e-9) break;
      bool stepped = false;
      for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
        Eigen::MatrixXd damped = h;
        damped.diagonal().array() += mu;
        Eigen::VectorXd delta = damped.ldlt().solve(-g);
        std::vector<double> backup = theta_;
        for (int k = 0; k < p; ++k) theta_[static_cast<std::size_t>(k)] += delta(k);
        double trial = compute(x, y, nullptr, nullptr);
        if (trial < sse) {
          sse = trial;
          mu = std::max(mu * 0.1, 1e-12);
          stepped = true;
        } else {
          theta_ = backup;
          mu = std::min(mu * 10.0, 1e10);
        }
      }
      if (!stepped || sse < 1e-12) break;
      compute(x, y, &jac, &residual);
    }
  }

  double output(const std::vector<double>& x) const {
    double out = b2();
    for (int h = 0; h < hidden_; ++h) {
      double a = b1(h);
      for (int j = 0; j < dims_; ++j) a += w1(h, j) * x[static_cast<std::size_t>(j)];
      out += w2(h) * std::tanh(a);
    }
    if (cascade_)
      for (int j = 0; j < dims_; ++j) out += ws(j) * x[static_cast<std::size_t>(j)];
    return out;
  }

  int predict(const std::vector<double>& x) const { return output(x) >= 0 ? 1 : -1; }

 private:
  int param_count() const {
    return hidden_ * dims_ + hidden_ + hidden_ + 1 + (cascade_ ? dims_ : 0);
  }
  // parameter layout: W1 row-major, b1, w2, b2, [ws]
  double w1(int h, int j) const { return theta_[static_cast<std::size_t>(h * dims_ + j)]; }
  double b1(int h) const { return theta_[static_cast<std::size_t>(hidden_ * dims_ + h)]; }
  double w2(int h) const { return theta_[static_cast<std::size_t>(hidden_ * dims_ + hidden_ + h)]; }
  double b2() const { return theta_[static_cast<std::size_t>(hidden_ * dims_ + 2 * hidden_)]; }
  double ws(int j) const {
    return theta_[static_cast<std::size_t>(hidden_ * dims_ + 2 * hidden_ + 1 + j)];
  }

  double compute(const Matrix& x, const std::vector<double>& y, Eigen::MatrixXd* jac,
                 Eigen::VectorXd* residual) const {
    const int n = static_cast<int>(x.size());
    double sse = 0;
    for (int i = 0; i < n; ++i) {
      const auto& xi = x[static_cast<std::size_t>(i)];
      double out = b2();
      std::vector<double> act(static_cast<std::size_t>(hidden_));
      for (int h = 0; h < hidden_; ++h) {
        double a = b1(h);
        for (int j = 0; j < dims_; ++j) a += w1(h, j) * xi[static_cast<std::size_t>(j)];
        act[static_cast<std::size_t>(h)] = std::tanh(a);
        out += w2(h) * act[static_cast<std::size_t>(h)];
      }
      if (cascade_)
        for (int j = 0; j < dims_; ++j) out += ws(j) * xi[static_cast<std::size_t>(j)];
      double r = out - y[static_cast<std::size_t>(i)];
      sse += r * r;
      if (!jac) continue;
      (*residual)(i) = r;
      for (int h = 0; h < hidden_; ++h) {
        double t = act[static_cast<std::size_t>(h)];
        double dtanh = 1.0 - t * t;
        for (int j = 0; j < dims_; ++j)
          (*jac)(i, h * dims_ + j) = w2(h) * dtanh * xi[static_cast<std::size_t>(j)];
        (*jac)(i, hidden_ * dims_ + h) = w2(h) * dtanh;
        (*jac)(i, hidden_ * dims_ + hidden_ + h) = t;
      }
      (*jac)(i, hidden_ * dims_ + 2 * hidden_) = 1.0;
      if (cascade_)
        for (int j = 0; j < dims_; ++j)
          (*jac)(i, hidden_ * dims_ + 2 * hidden_ + 1 + j) = xi[static_cast<std::size_t>(j)];
    }
    return sse;
  }

  int hidden_, dims_ = 0;
  bool cascade_;
  std::vector<double> theta_;
};

}  // namespace vom::learn
