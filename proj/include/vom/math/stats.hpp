#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace vom::math {

// Sample mean/covariance of row vectors with a small ridge so log|Sigma|
// stays defined for short blocks.
struct GaussianFull {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double log_det = 0;
  int count = 0;

  static GaussianFull fit(const Eigen::MatrixXd& rows, double ridge = 1e-6) {
    if (rows.rows() < 2) throw std::invalid_argument("GaussianFull::fit needs >=2 rows");
    GaussianFull g;
    g.count = static_cast<int>(rows.rows());
    g.mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - g.mean.transpose();
    g.cov = (centered.transpose() * centered) / static_cast<double>(rows.rows());
    g.cov.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g.cov);
    g.log_det = ldlt.vectorD().array().max(1e-300).log().sum();
    return g;
  }
};

// Generalized likelihood ratio between two feature blocks, each modeled as
// one full-covariance Gaussian versus a single shared one. Non-negative up
// to the ridge; ~0 for statistically identical blocks.
inline double glr_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd both(a.rows() + b.rows(), a.cols());
  both << a, b;
  GaussianFull ga = GaussianFull::fit(a);
  GaussianFull gb = GaussianFull::fit(b);
  GaussianFull gj = GaussianFull::fit(both);
  double na = static_cast<double>(a.rows());
  double nb = static_cast<double>(b.rows());
  return 0.5 * ((na + nb) * gj.log_det - na * ga.log_det - nb * gb.log_det);
}

inline Eigen::MatrixXd to_matrix(std::span<const std::vector<double>> rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace vom::math
