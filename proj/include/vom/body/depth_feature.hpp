#pragma once

#include <cmath>
#include <stdexcept>

#include "vom/image.hpp"

namespace vom::body {

// Far-background depth substituted for probes that leave the image or hit
// an invalid reading.
inline constexpr double kBackgroundDepthMm = 10000.0;

// Probe offsets in pixel*millimeter units; dividing by the center depth
// makes the probe geometry scale with distance.
struct ProbeOffsets {
  double nu_x = 0, nu_y = 0;
  double mu_x = 0, mu_y = 0;
};

inline double probe_depth(const ImageU16& depth, int x, int y) {
  if (!depth.in_bounds(x, y)) return kBackgroundDepthMm;
  double d = depth.at(x, y);
  return d > 0 ? d : kBackgroundDepthMm;
}

// Difference of the two normalized probes around (x, y).
inline double depth_feature(const ImageU16& depth, int x, int y, const ProbeOffsets& theta) {
  if (!depth.in_bounds(x, y)) throw std::invalid_argument("depth_feature: pixel out of bounds");
  double d0 = depth.at(x, y);
  if (d0 <= 0) throw std::invalid_argument("depth_feature: invalid center depth");
  int nx = x + static_cast<int>(std::lround(theta.nu_x / d0));
  int ny = y + static_cast<int>(std::lround(theta.nu_y / d0));
  int mx = x + static_cast<int>(std::lround(theta.mu_x / d0));
  int my = y + static_cast<int>(std::lround(theta.mu_y / d0));
  return probe_depth(depth, nx, ny) - probe_depth(depth, mx, my);
}

}  // namespace vom::body
