#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vom/body/forest.hpp"
#include "vom/core/media.hpp"
#include "vom/image.hpp"

namespace vom::body {

struct FlowConfig {
  int levels = 3;        // pyramid levels including the base
  int window_half = 7;   // 15x15 integration window
  int max_iters = 20;
  double epsilon = 0.01;
  double min_eig = 1e-4; // normalized structure-tensor eigenvalue floor
  int grid_step = 4;     // tracked-point spacing inside the mask
};

struct FlowField {
  std::vector<std::array<float, 2>> points;
  std::vector<std::array<float, 2>> flow;
  std::vector<bool> valid;

  double mean_magnitude() const {
    double acc = 0;
    int n = 0;
    for (std::size_t i = 0; i < flow.size(); ++i) {
      if (!valid[i]) continue;
      acc += std::hypot(flow[i][0], flow[i][1]);
      ++n;
    }
    return n > 0 ? acc / n : 0.0;
  }
};

namespace detail {

inline ImageF32 downsample2(const ImageF32& src) {
  int w = std::max(1, src.width() / 2), h = std::max(1, src.height() / 2);
  ImageF32 dst(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int sx = 2 * x, sy = 2 * y;
      float acc = 0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          int px = sx + dx, py = sy + dy;
          if (src.in_bounds(px, py)) {
            acc += src.at(px, py);
            ++n;
          }
        }
      dst.at(x, y) = acc / static_cast<float>(n);
    }
  return dst;
}

inline std::vector<ImageF32> build_pyramid(const ImageF32& base, int levels) {
  std::vector<ImageF32> pyr{base};
  for (int l = 1; l < levels; ++l) {
    if (pyr.back().width() < 16 || pyr.back().height() < 16) break;
    pyr.push_back(downsample2(pyr.back()));
  }
  return pyr;
}

// One iterative LK solve at a single pyramid level. Returns false when the
// window has no trackable structure.
inline bool lk_at_level(const ImageF32& prev, const ImageF32& cur, float px, float py,
                        float& vx, float& vy, const FlowConfig& cfg) {
  const int h = cfg.window_half;
  const int n = 2 * h + 1;
  std::vector<float> patch(static_cast<std::size_t>(n) * n);
  std::vector<float> gx(patch.size()), gy(patch.size());
  double a11 = 0, a12 = 0, a22 = 0;
  for (int dy = -h; dy <= h; ++dy)
    for (int dx = -h; dx <= h; ++dx) {
      std::size_t i = static_cast<std::size_t>((dy + h) * n + (dx + h));
      float x = px + dx, y = py + dy;
      patch[i] = sample_bilinear(prev, x, y);
      gx[i] = 0.5f * (sample_bilinear(prev, x + 1, y) - sample_bilinear(prev, x - 1, y));
      gy[i] = 0.5f * (sample_bilinear(prev, x, y + 1) - sample_bilinear(prev, x, y - 1));
      a11 += gx[i] * gx[i];
      a12 += gx[i] * gy[i];
      a22 += gy[i] * gy[i];
    }
  double norm = static_cast<double>(n) * n;
  double tr = (a11 + a22) / norm;
  double det = (a11 * a22 - a12 * a12) / (norm * norm);
  double min_eig = tr / 2 - std::sqrt(std::max(tr * tr / 4 - det, 0.0));
  if (min_eig < cfg.min_eig) return false;
  double det_full = a11 * a22 - a12 * a12;

  for (int it = 0; it < cfg.max_iters; ++it) {
    double b1 = 0, b2 = 0;
    for (int dy = -h; dy <= h; ++dy)
      for (int dx = -h; dx <= h; ++dx) {
        std::size_t i = static_cast<std::size_t>((dy + h) * n + (dx + h));
        float dt = patch[i] - sample_bilinear(cur, px + vx + dx, py + vy + dy);
        b1 += gx[i] * dt;
        b2 += gy[i] * dt;
      }
    double ux = (a22 * b1 - a12 * b2) / det_full;
    double uy = (a11 * b2 - a12 * b1) / det_full;
    vx += static_cast<float>(ux);
    vy += static_cast<float>(uy);
    if (std::hypot(ux, uy) < cfg.epsilon) break;
  }
  return true;
}

}  // namespace detail

// Coarse-to-fine translation estimate for each point.
inline FlowField lk_flow(const ImageF32& prev, const ImageF32& cur,
                         const std::vector<std::array<float, 2>>& points,
                         const FlowConfig& cfg = {}) {
  if (prev.width() != cur.width() || prev.height() != cur.height())
    throw std::invalid_argument("lk_flow: frame dimensions differ");
  auto pyr_prev = detail::build_pyramid(prev, cfg.levels);
  auto pyr_cur = detail::build_pyramid(cur, cfg.levels);
  int levels = static_cast<int>(pyr_prev.size());

  FlowField out;
  out.points = points;
  out.flow.assign(points.size(), {0.0f, 0.0f});
  out.valid.assign(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    float vx = 0, vy = 0;
    bool ok = false;
    for (int l = levels - 1; l >= 0; --l) {
      float scale = static_cast<float>(1 << l);
      float px = points[i][0] / scale, py = points[i][1] / scale;
      vx *= 2, vy *= 2;
      bool level_ok = detail::lk_at_level(pyr_prev[static_cast<std::size_t>(l)],
                                          pyr_cur[static_cast<std::size_t>(l)], px, py, vx, vy,
                                          cfg);
      if (l == 0) ok = level_ok;
    }
    out.flow[i] = {vx, vy};
    out.valid[i] = ok;
  }
  return out;
}

inline std::vector<std::array<float, 2>> grid_points_in_mask(const ImageU8& mask, int step) {
  std::vector<std::array<float, 2>> pts;
  for (int y = step / 2; y < mask.height(); y += step)
    for (int x = step / 2; x < mask.width(); x += step)
      if (mask.at(x, y)) pts.push_back({static_cast<float>(x), static_cast<float>(y)});
  return pts;
}

// Mean optical-flow magnitude over the upper-body region between two
// consecutive frames.
inline double upper_body_flow(const core::FrameBundle& prev, const core::FrameBundle& cur,
                              const BodyMask& mask, const FlowConfig& cfg = {}) {
  ImageU8 region = mask.upper_body();
  auto pts = grid_points_in_mask(region, cfg.grid_step);
  if (pts.empty()) throw std::invalid_argument("upper_body_flow: empty upper-body mask");
  auto flow = lk_flow(to_gray(prev.rgb), to_gray(cur.rgb), pts, cfg);
  return flow.mean_magnitude();
}

}  // namespace vom::body
