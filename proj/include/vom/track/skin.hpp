#pragma once

#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vom/image.hpp"
#include "vom/math/gmm.hpp"

namespace vom::track {

// Color model learned from manually marked pixels. The gate is applied to
// the posterior of skin against a uniform color background.
struct SkinModel {
  math::DiagGmm gmm;
  double gate = 0.6;
};

inline constexpr double kUniformColorDensity = 1.0 / (256.0 * 256.0 * 256.0);
inline constexpr int kMinMarkedPixels = 30;

inline SkinModel learn_skin(const ImageU8& rgb, const std::vector<std::pair<int, int>>& marked,
                            double gate, std::uint64_t seed, int components = 3) {
  if (static_cast<int>(marked.size()) < kMinMarkedPixels)
    throw std::invalid_argument("learn_skin: need at least " +
                                std::to_string(kMinMarkedPixels) + " marked pixels, got " +
                                std::to_string(marked.size()));
  std::vector<std::vector<double>> colors;
  colors.reserve(marked.size());
  for (auto [x, y] : marked)
    colors.push_back({static_cast<double>(rgb.at(x, y, 0)), static_cast<double>(rgb.at(x, y, 1)),
                      static_cast<double>(rgb.at(x, y, 2))});
  SkinModel model;
  model.gate = gate;
  model.gmm = math::DiagGmm::fit(colors, components, seed, 1e-5, 200, 4.0);
  return model;
}

inline double skin_score(const SkinModel& model, double r, double g, double b) {
  double pdf = std::exp(model.gmm.log_pdf({r, g, b}));
  return pdf / (pdf + kUniformColorDensity);
}

inline ImageU8 skin_mask(const ImageU8& rgb, const SkinModel& model) {
  ImageU8 mask(rgb.width(), rgb.height(), 1, 0);
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x)
      if (skin_score(model, rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2)) >= model.gate)
        mask.at(x, y) = 1;
  return mask;
}

// Binary 3x3 closing (dilation then erosion with a square element).
inline ImageU8 close3x3(const ImageU8& mask) {
  int w = mask.width(), h = mask.height();
  ImageU8 dil(w, h, 1, 0), out(w, h, 1, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = 0;
      for (int dy = -1; dy <= 1 && !v; ++dy)
        for (int dx = -1; dx <= 1 && !v; ++dx) {
          int nx = x + dx, ny = y + dy;
          if (mask.in_bounds(nx, ny) && mask.at(nx, ny)) v = 1;
        }
      dil.at(x, y) = v;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = 1;
      for (int dy = -1; dy <= 1 && v; ++dy)
        for (int dx = -1; dx <= 1 && v; ++dx) {
          int nx = x + dx, ny = y + dy;
          // treat outside as set so border pixels survive erosion
          if (dil.in_bounds(nx, ny) && !dil.at(nx, ny)) v = 0;
        }
      out.at(x, y) = v;
    }
  return out;
}

struct Blob {
  double cx = 0, cy = 0;
  double area = 0;  // pixels
  std::vector<std::pair<int, int>> pixels;
};

inline int min_blob_area(int width, int height) {
  // 25 px at 640x480, scaled with resolution
  double scaled = 25.0 * (static_cast<double>(width) * height) / (640.0 * 480.0);
  return std::max(1, static_cast<int>(std::lround(scaled)));
}

// 8-connected components at or above the area floor, largest first.
inline std::vector<Blob> find_blobs(const ImageU8& mask, int min_area) {
  int w = mask.width(), h = mask.height();
  std::vector<int> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Blob> blobs;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (!mask.at(x0, y0) || seen[static_cast<std::size_t>(y0) * w + x0]) continue;
      Blob blob;
      std::deque<std::pair<int, int>> queue{{x0, y0}};
      seen[static_cast<std::size_t>(y0) * w + x0] = 1;
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        blob.pixels.emplace_back(x, y);
        blob.cx += x;
        blob.cy += y;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = x + dx, ny = y + dy;
            if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) continue;
            auto& flag = seen[static_cast<std::size_t>(ny) * w + nx];
            if (!flag) {
              flag = 1;
              queue.emplace_back(nx, ny);
            }
          }
      }
      blob.area = static_cast<double>(blob.pixels.size());
      if (blob.area < min_area) continue;
      blob.cx /= blob.area;
      blob.cy /= blob.area;
      blobs.push_back(std::move(blob));
    }
  std::stable_sort(blobs.begin(), blobs.end(),
                   [](const Blob& a, const Blob& b) { return a.area > b.area; });
  return blobs;
}

inline std::vector<Blob> skin_blobs(const ImageU8& rgb, const SkinModel& model) {
  auto mask = close3x3(skin_mask(rgb, model));
  return find_blobs(mask, min_blob_area(rgb.width(), rgb.height()));
}

}  // namespace vom::track
