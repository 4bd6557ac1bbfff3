#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vom/image.hpp"

namespace vom::face {

inline constexpr int kOrientationBins = 18;  // signed, 20 degrees each
inline constexpr int kCellSize = 4;
// 18 block-normalized orientation channels plus one local-contrast channel.
inline constexpr int kHogDims = kOrientationBins + 1;

struct HogGrid {
  int cells_x = 0, cells_y = 0;
  std::vector<double> data;  // cells_x * cells_y * kHogDims

  const double* cell(int cx, int cy) const {
    return data.data() + (static_cast<std::size_t>(cy) * cells_x + cx) * kHogDims;
  }
  double* cell(int cx, int cy) {
    return data.data() + (static_cast<std::size_t>(cy) * cells_x + cx) * kHogDims;
  }
  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cx < cells_x && cy >= 0 && cy < cells_y;
  }
};

namespace detail {
// Soft vote into the two neighboring signed-orientation bins.
inline void vote(std::vector<double>& hist, double gx, double gy) {
  double mag = std::hypot(gx, gy);
  if (mag <= 0) return;
  double angle = std::atan2(gy, gx);                     // [-pi, pi)
  double t = angle / (2 * M_PI / kOrientationBins);      // bin position
  double tf = std::floor(t);
  int b0 = static_cast<int>(tf) % kOrientationBins;
  if (b0 < 0) b0 += kOrientationBins;
  int b1 = (b0 + 1) % kOrientationBins;
  double f = t - tf;
  hist[static_cast<std::size_t>(b0)] += mag * (1 - f);
  hist[static_cast<std::size_t>(b1)] += mag * f;
}
}  // namespace detail

// Cell histograms with a centered 3x3-block L2 normalization; channel 18
// carries the cell-to-neighborhood energy ratio.
inline HogGrid hog_cells(const ImageF32& gray) {
  HogGrid grid;
  grid.cells_x = gray.width() / kCellSize;
  grid.cells_y = gray.height() / kCellSize;
  if (grid.cells_x < 1 || grid.cells_y < 1)
    throw std::invalid_argument("hog_cells: image smaller than one cell");
  grid.data.assign(static_cast<std::size_t>(grid.cells_x) * grid.cells_y * kHogDims, 0.0);

  std::vector<double> raw(static_cast<std::size_t>(grid.cells_x) * grid.cells_y *
                          kOrientationBins, 0.0);
  std::vector<double> energy(static_cast<std::size_t>(grid.cells_x) * grid.cells_y, 0.0);
  std::vector<double> hist(kOrientationBins);
  for (int cy = 0; cy < grid.cells_y; ++cy)
    for (int cx = 0; cx < grid.cells_x; ++cx) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (int py = 0; py < kCellSize; ++py)
        for (int px = 0; px < kCellSize; ++px) {
          int x = cx * kCellSize + px, y = cy * kCellSize + py;
          int xm = std::max(x - 1, 0), xp = std::min(x + 1, gray.width() - 1);
          int ym = std::max(y - 1, 0), yp = std::min(y + 1, gray.height() - 1);
          double gx = 0.5 * (gray.at(xp, y) - gray.at(xm, y));
          double gy = 0.5 * (gray.at(x, yp) - gray.at(x, ym));
          detail::vote(hist, gx, gy);
        }
      std::size_t ci = static_cast<std::size_t>(cy) * grid.cells_x + cx;
      double e = 0;
      for (int b = 0; b < kOrientationBins; ++b) {
        raw[ci * kOrientationBins + b] = hist[static_cast<std::size_t>(b)];
        e += hist[static_cast<std::size_t>(b)] * hist[static_cast<std::size_t>(b)];
      }
      energy[ci] = e;
    }

  for (int cy = 0; cy < grid.cells_y; ++cy)
    for (int cx = 0; cx < grid.cells_x; ++cx) {
      double block = 0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int nx = cx + dx, ny = cy + dy;
          if (!grid.in_bounds(nx, ny)) continue;
          block += energy[static_cast<std::size_t>(ny) * grid.cells_x + nx];
          ++n;
        }
      std::size_t ci = static_cast<std::size_t>(cy) * grid.cells_x + cx;
      double norm = std::sqrt(block + 1e-6);
      double* out = grid.cell(cx, cy);
      for (int b = 0; b < kOrientationBins; ++b)
        out[b] = raw[ci * kOrientationBins + b] / norm;
      out[kOrientationBins] = std::sqrt(energy[ci] / (block / n + 1e-6));
    }
  return grid;
}

// Whole-patch orientation mass over the 18 signed channels, normalized to
// sum 1. A constant patch has no orientation and comes back empty.
inline std::optional<std::vector<double>> hog_polar(const ImageF32& patch) {
  if (patch.width() < 2 || patch.height() < 2)
    throw std::invalid_argument("hog_polar: patch must be at least 2x2");
  std::vector<double> hist(kOrientationBins, 0.0);
  for (int y = 0; y < patch.height(); ++y)
    for (int x = 0; x < patch.width(); ++x) {
      int xm = std::max(x - 1, 0), xp = std::min(x + 1, patch.width() - 1);
      int ym = std::max(y - 1, 0), yp = std::min(y + 1, patch.height() - 1);
      double gx = 0.5 * (patch.at(xp, y) - patch.at(xm, y));
      double gy = 0.5 * (patch.at(x, yp) - patch.at(x, ym));
      detail::vote(hist, gx, gy);
    }
  double sum = 0;
  for (double v : hist) sum += v;
  if (sum <= 0) return std::nullopt;
  for (double& v : hist) v /= sum;
  return hist;
}

}  // namespace vom::face
