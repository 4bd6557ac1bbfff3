#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "vom/learn/preprocess.hpp"

namespace vom::learn {

// Two-class linear discriminant with shrinkage on the pooled covariance
// (sample counts here are far below the feature count).
class Lda {
 public:
  void fit(const Matrix& x, const std::vector<int>& y) {
    if (x.empty() || x.size() != y.size()) throw std::invalid_argument("Lda::fit: bad data");
    const Eigen::Index d = static_cast<Eigen::Index>(x[0].size());
    Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(d), mu_neg = Eigen::VectorXd::Zero(d);
    int n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      Eigen::Map<const Eigen::VectorXd> v(x[i].data(), d);
      if (y[i] > 0) {
        mu_pos += v;
        ++n_pos;
      } else {
        mu_neg += v;
        ++n_neg;
      }
    }
    if (n_pos == 0 || n_neg == 0)
      throw std::invalid_argument("Lda::fit: both classes must be present");
    mu_pos /= n_pos;
    mu_neg /= n_neg;

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Eigen::Map<const Eigen::VectorXd> v(x[i].data(), d);
      Eigen::VectorXd c = v - (y[i] > 0 ? mu_pos : mu_neg);
      pooled += c * c.transpose();
    }
    pooled /= static_cast<double>(x.size());
    double shrink = 1e-2 * pooled.trace() / static_cast<double>(d) + 1e-9;
    pooled.diagonal().array() += shrink;

    w_ = pooled.ldlt().solve(mu_pos - mu_neg);
    bias_ = -w_.dot((mu_pos + mu_neg) / 2.0) +
            std::log(static_cast<double>(n_pos) / static_cast<double>(n_neg));
  }

  double decision(const std::vector<double>& x) const {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), w_.size());
    return w_.dot(v) + bias_;
  }

  int predict(const std::vector<double>& x) const { return decision(x) >= 0 ? 1 : -1; }

 private:
  Eigen::VectorXd w_;
  double bias_ = 0;
};

}  // namespace vom::learn
