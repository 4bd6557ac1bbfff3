#pragma once

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/core/manifest.hpp"
#include "vom/image.hpp"

namespace vom::core {

struct MediaIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingFrameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// WAV, 16-bit PCM only.

struct WavData {
  int sample_rate = 16000;
  std::vector<std::vector<double>> channels;  // samples scaled to [-1,1)

  double duration_s() const {
    return channels.empty() ? 0.0 : channels[0].size() / static_cast<double>(sample_rate);
  }
};

namespace detail {
inline void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  b.push_back(v & 0xff), b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff), b.push_back((v >> 24) & 0xff);
}
inline void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xff), b.push_back((v >> 8) & 0xff);
}
inline std::uint32_t get_u32(const std::uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
}
inline std::uint16_t get_u16(const std::uint8_t* p) { return p[0] | (p[1] << 8); }
}  // namespace detail

inline void write_wav(const WavData& wav, const std::filesystem::path& path) {
  if (wav.channels.empty()) throw MediaIoError("write_wav: no channels");
  std::size_t n = wav.channels[0].size();
  for (const auto& c : wav.channels)
    if (c.size() != n) throw MediaIoError("write_wav: channel length mismatch");
  std::uint16_t nch = static_cast<std::uint16_t>(wav.channels.size());
  std::uint32_t data_bytes = static_cast<std::uint32_t>(n * nch * 2);

  std::vector<std::uint8_t> b;
  b.reserve(44 + data_bytes);
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  tag("RIFF");
  detail::put_u32(b, 36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  detail::put_u32(b, 16);
  detail::put_u16(b, 1);  // PCM
  detail::put_u16(b, nch);
  detail::put_u32(b, wav.sample_rate);
  detail::put_u32(b, wav.sample_rate * nch * 2);
  detail::put_u16(b, nch * 2);
  detail::put_u16(b, 16);
  tag("data");
  detail::put_u32(b, data_bytes);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& ch : wav.channels) {
      double v = std::clamp(ch[i], -1.0, 32767.0 / 32768.0);
      auto s = static_cast<std::int16_t>(std::lrint(v * 32768.0));
      detail::put_u16(b, static_cast<std::uint16_t>(s));
    }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw MediaIoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

inline WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MediaIoError("cannot open " + path.string());
  std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
  if (b.size() < 44 || std::memcmp(b.data(), "RIFF", 4) != 0 ||
      std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw MediaIoError("not a RIFF/WAVE file: " + path.string());

  WavData wav;
  std::uint16_t nch = 0, bits = 0;
  std::size_t pos = 12;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_len = 0;
  while (pos + 8 <= b.size()) {
    std::uint32_t len = detail::get_u32(&b[pos + 4]);
    if (std::memcmp(&b[pos], "fmt ", 4) == 0 && len >= 16) {
      std::uint16_t fmt = detail::get_u16(&b[pos + 8]);
      if (fmt != 1) throw MediaIoError("unsupported WAV encoding (want PCM)");
      nch = detail::get_u16(&b[pos + 10]);
      wav.sample_rate = static_cast<int>(detail::get_u32(&b[pos + 12]));
      bits = detail::get_u16(&b[pos + 22]);
    } else if (std::memcmp(&b[pos], "data", 4) == 0) {
      data = &b[pos + 8];
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (!data || nch == 0) throw MediaIoError("missing fmt/data chunk: " + path.string());
  if (bits != 16) throw MediaIoError("unsupported bit depth (want 16)");
  std::size_t frames = data_len / (nch * 2);
  wav.channels.assign(nch, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i)
    for (std::uint16_t c = 0; c < nch; ++c) {
      auto s = static_cast<std::int16_t>(detail::get_u16(data + (i * nch + c) * 2));
      wav.channels[c][i] = s / 32768.0;
    }
  return wav;
}

// ---------------------------------------------------------------------------
// PGM (P5), 16-bit big-endian, depth in millimeters. 0 marks invalid depth.

inline void write_pgm16(const ImageU16& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MediaIoError("cannot write " + path.string());
  out << "P5\n" << img.width() << " " << img.height() << "\n65535\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width()) * 2);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::uint16_t v = img.at(x, y);
      row[2 * x] = static_cast<std::uint8_t>(v >> 8);
      row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

inline ImageU16 read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MediaIoError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw MediaIoError("not a P5 PGM: " + path.string());
  auto next_int = [&]() {
    int v;
    while (in >> std::ws) {
      if (in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (in >> v) return v;
      break;
    }
    throw MediaIoError("truncated PGM header: " + path.string());
  };
  int w = next_int(), h = next_int(), maxval = next_int();
  if (maxval != 65535) throw MediaIoError("expected 16-bit PGM: " + path.string());
  in.get();  // single whitespace after maxval
  ImageU16 img(w, h, 1);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * 2);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw MediaIoError("truncated PGM data: " + path.string());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::size_t i = (static_cast<std::size_t>(y) * w + x) * 2;
      img.at(x, y) = static_cast<std::uint16_t>((buf[i] << 8) | buf[i + 1]);
    }
  return img;
}

// ---------------------------------------------------------------------------
// PNG, 8-bit RGB via libpng.

inline void write_png_rgb(const ImageU8& img, const std::filesystem::path& path) {
  if (img.channels() != 3) throw MediaIoError("write_png_rgb wants 3 channels");
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw MediaIoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw MediaIoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw MediaIoError("libpng write failed: " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = const_cast<png_bytep>(img.data() + static_cast<std::size_t>(y) * img.width() * 3);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

inline ImageU8 read_png_rgb(const std::filesystem::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "rb");
  if (!fp) throw MediaIoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw MediaIoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw MediaIoError("libpng read failed: " + path.string());
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  int w = static_cast<int>(png_get_image_width(png, info));
  int h = static_cast<int>(png_get_image_height(png, info));
  ImageU8 img(w, h, 3);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = img.data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

// ---------------------------------------------------------------------------
// Registered RGB+depth frame pair.

struct FrameBundle {
  int index = 0;
  ImageU8 rgb;     // HxW, 3 channels
  ImageU16 depth;  // HxW millimeters, 0 = invalid
};

inline std::string frame_name(int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.%s", index, ext);
  return buf;
}

// Ordered single-consumer stream over [first,last]. Missing files or a
// size mismatch raise immediately instead of skipping.
class FrameStream {
 public:
  FrameStream(const SessionManifest& manifest, int first, int last)
      : rgb_dir_(manifest.rgb_path()), depth_dir_(manifest.depth_path()),
        next_(first), last_(last) {
    if (first < 0 || last >= manifest.frame_count || first > last)
      throw MissingFrameError("frame range [" + std::to_string(first) + "," +
                              std::to_string(last) + "] outside recorded frames [0," +
                              std::to_string(manifest.frame_count - 1) + "]");
  }

  int remaining() const { return last_ - next_ + 1; }

  std::optional<FrameBundle> next() {
    if (next_ > last_) return std::nullopt;
    FrameBundle fb;
    fb.index = next_++;
    auto rgb_file = rgb_dir_ / frame_name(fb.index, "png");
    auto depth_file = depth_dir_ / frame_name(fb.index, "pgm");
    if (!std::filesystem::exists(rgb_file))
      throw MissingFrameError("missing rgb frame " + std::to_string(fb.index) + ": " +
                              rgb_file.string());
    if (!std::filesystem::exists(depth_file))
      throw MissingFrameError("missing depth frame " + std::to_string(fb.index) + ": " +
                              depth_file.string());
    fb.rgb = read_png_rgb(rgb_file);
    fb.depth = read_pgm16(depth_file);
    if (fb.rgb.width() != fb.depth.width() || fb.rgb.height() != fb.depth.height())
      throw DimensionMismatchError("frame " + std::to_string(fb.index) +
                                   ": rgb and depth dimensions differ");
    return fb;
  }

 private:
  std::filesystem::path rgb_dir_, depth_dir_;
  int next_, last_;
};

inline FrameStream load_frames(const SessionManifest& manifest, int first, int last) {
  return FrameStream(manifest, first, last);
}

inline FrameStream load_frames(const SessionManifest& manifest) {
  return FrameStream(manifest, 0, manifest.frame_count - 1);
}

}  // namespace vom::core
