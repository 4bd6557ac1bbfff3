#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "vom/body/geometry.hpp"
#include "vom/image.hpp"

namespace vom::body {

struct NoPlaneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Plane {
  // unit normal, n . p = offset, oriented so offset >= 0
  double nx = 0, ny = 0, nz = 0;
  double offset = 0;

  double signed_distance(const Point3D& p) const {
    return nx * p.x + ny * p.y + nz * p.z - offset;
  }
};

struct PlaneFitConfig {
  int iterations = 500;
  double inlier_tol_mm = 10.0;
  double min_inlier_ratio = 0.15;
  int min_points = 50;
  int sample_step = 2;  // pixel subsampling of the depth map
  std::uint64_t seed = 7;
};

struct PlaneFit {
  Plane plane;
  std::vector<std::pair<int, int>> inlier_pixels;
  double inlier_ratio = 0;
};

namespace detail {
inline Plane plane_from_points(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                               const Eigen::Vector3d& c) {
  Eigen::Vector3d n = (b - a).cross(c - a);
  double len = n.norm();
  Plane p;
  if (len < 1e-9) return p;  // degenerate, zero normal rejects everything
  n /= len;
  double off = n.dot(a);
  if (off < 0) {
    n = -n;
    off = -off;
  }
  p.nx = n.x(), p.ny = n.y(), p.nz = n.z();
  p.offset = off;
  return p;
}

inline Plane least_squares_plane(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    Eigen::Vector3d d = p - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  Eigen::Vector3d n = eig.eigenvectors().col(0);  // smallest eigenvalue
  n.normalize();
  double off = n.dot(centroid);
  if (off < 0) {
    n = -n;
    off = -off;
  }
  Plane p;
  p.nx = n.x(), p.ny = n.y(), p.nz = n.z();
  p.offset = off;
  return p;
}
}  // namespace detail

// RANSAC over the projected point cloud, least-squares refit on the
// consensus set. Pixels in exclude (nonzero) are ignored.
inline PlaneFit segment_plane(const ImageU16& depth, const core::CameraIntrinsics& cam,
                              const PlaneFitConfig& cfg = {},
                              const ImageU8* exclude = nullptr) {
  std::vector<Eigen::Vector3d> pts;
  std::vector<std::pair<int, int>> pixels;
  for (int y = 0; y < depth.height(); y += cfg.sample_step)
    for (int x = 0; x < depth.width(); x += cfg.sample_step) {
      if (depth.at(x, y) == 0) continue;
      if (exclude && exclude->at(x, y)) continue;
      Point3D p = project_3d(x, y, depth.at(x, y), cam);
      pts.emplace_back(p.x, p.y, p.z);
      pixels.emplace_back(x, y);
    }
  if (static_cast<int>(pts.size()) < cfg.min_points)
    throw NoPlaneError("segment_plane: too few valid depth pixels (" +
                       std::to_string(pts.size()) + ")");

  auto rng = make_rng(cfg.seed, 0x9A);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  int best_count = 0;
  Plane best;
  for (int it = 0; it < cfg.iterations; ++it) {
    std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    if (i == j || j == k || i == k) continue;
    Plane cand = detail::plane_from_points(pts[i], pts[j], pts[k]);
    if (cand.nx == 0 && cand.ny == 0 && cand.nz == 0) continue;
    int count = 0;
    for (const auto& p : pts) {
      double d = cand.nx * p.x() + cand.ny * p.y() + cand.nz * p.z() - cand.offset;
      if (std::abs(d) <= cfg.inlier_tol_mm) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = cand;
    }
  }
  double ratio = static_cast<double>(best_count) / static_cast<double>(pts.size());
  if (best_count < cfg.min_points || ratio < cfg.min_inlier_ratio)
    throw NoPlaneError("segment_plane: no plane reaches the inlier floor (best " +
                       std::to_string(ratio) + ")");

  // refine on the consensus set, then recollect inliers
  std::vector<Eigen::Vector3d> consensus;
  for (const auto& p : pts) {
    double d = best.nx * p.x() + best.ny * p.y() + best.nz * p.z() - best.offset;
    if (std::abs(d) <= cfg.inlier_tol_mm) consensus.push_back(p);
  }
  PlaneFit fit;
  fit.plane = detail::least_squares_plane(consensus);
  int count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = fit.plane.nx * pts[i].x() + fit.plane.ny * pts[i].y() + fit.plane.nz * pts[i].z() -
               fit.plane.offset;
    if (std::abs(d) <= cfg.inlier_tol_mm) {
      fit.inlier_pixels.push_back(pixels[i]);
      ++count;
    }
  }
  fit.inlier_ratio = static_cast<double>(count) / static_cast<double>(pts.size());
  return fit;
}

}  // namespace vom::body
