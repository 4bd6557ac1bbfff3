#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <vector>

namespace vom {

// Row-major interleaved image. channels() is runtime (1 for depth or
// grayscale, 3 for RGB).
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, T fill = T{})
      : w_(width), h_(height), c_(channels),
        data_(static_cast<std::size_t>(width) * height * channels, fill) {}

  int width() const { return w_; }
  int height() const { return h_; }
  int channels() const { return c_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  T& at(int x, int y, int ch = 0) {
    assert(in_bounds(x, y) && ch < c_);
    return data_[(static_cast<std::size_t>(y) * w_ + x) * c_ + ch];
  }
  const T& at(int x, int y, int ch = 0) const {
    assert(in_bounds(x, y) && ch < c_);
    return data_[(static_cast<std::size_t>(y) * w_ + x) * c_ + ch];
  }

  bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& pixels() { return data_; }
  const std::vector<T>& pixels() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  int w_ = 0, h_ = 0, c_ = 0;
  std::vector<T> data_;
};

using ImageU8 = Image<std::uint8_t>;
using ImageU16 = Image<std::uint16_t>;
using ImageF32 = Image<float>;

inline ImageF32 to_gray(const ImageU8& rgb) {
  ImageF32 g(rgb.width(), rgb.height(), 1);
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x) {
      if (rgb.channels() >= 3) {
        g.at(x, y) = 0.299f * rgb.at(x, y, 0) + 0.587f * rgb.at(x, y, 1) +
                     0.114f * rgb.at(x, y, 2);
      } else {
        g.at(x, y) = rgb.at(x, y, 0);
      }
    }
  return g;
}

// Bilinear sample with clamped borders.
inline float sample_bilinear(const ImageF32& img, float x, float y) {
  x = std::clamp(x, 0.0f, static_cast<float>(img.width() - 1));
  y = std::clamp(y, 0.0f, static_cast<float>(img.height() - 1));
  int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
  int x1 = std::min(x0 + 1, img.width() - 1);
  int y1 = std::min(y0 + 1, img.height() - 1);
  float fx = x - x0, fy = y - y0;
  float v00 = img.at(x0, y0), v10 = img.at(x1, y0);
  float v01 = img.at(x0, y1), v11 = img.at(x1, y1);
  return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
         (1 - fx) * fy * v01 + fx * fy * v11;
}

}  // namespace vom
