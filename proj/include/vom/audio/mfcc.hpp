#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "vom/audio/mel.hpp"

namespace vom::audio {

// 13 cepstral coefficients plus first and second finite differences.
struct FeatureFrame {
  static constexpr int kCoeffs = 13;
  std::array<double, kCoeffs> mfcc{};
  std::array<double, kCoeffs> delta{};
  std::array<double, kCoeffs> delta2{};
  double time = 0;  // window start, seconds
  double energy = 0;

  std::vector<double> stacked() const {
    std::vector<double> v;
    v.reserve(3 * kCoeffs);
    v.insert(v.end(), mfcc.begin(), mfcc.end());
    v.insert(v.end(), delta.begin(), delta.end());
    v.insert(v.end(), delta2.begin(), delta2.end());
    return v;
  }
};

struct MfccConfig {
  int sample_rate = 16000;
  double window_s = 0.025;  // 400 samples at 16 kHz
  double hop_s = 0.010;     // 160 samples
  int n_fft = 512;
  int n_filters = 26;
  MelScaleConfig mel;
};

// FFTW plan creation is not thread safe; executions on distinct buffers are.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n), in_(n), out_(static_cast<std::size_t>(n) / 2 + 1) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan_ = fftw_plan_dft_r2c_1d(n, in_.data(), reinterpret_cast<fftw_complex*>(out_.data()),
                                 FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  // Magnitudes of bins [0, n/2]; input shorter than n is zero padded.
  std::vector<double> magnitude(std::span<const double> x) {
    if (static_cast<int>(x.size()) > n_) throw std::invalid_argument("RealFft: input too long");
    std::fill(in_.begin(), in_.end(), 0.0);
    std::copy(x.begin(), x.end(), in_.begin());
    fftw_execute(plan_);
    std::vector<double> mag(out_.size());
    for (std::size_t i = 0; i < out_.size(); ++i) mag[i] = std::abs(out_[i]);
    return mag;
  }

 private:
  static std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
  }
  int n_;
  std::vector<double> in_;
  std::vector<std::complex<double>> out_;
  fftw_plan plan_;
};

namespace detail {
// DCT-II of log filter energies, first n_out coefficients.
inline std::vector<double> dct2(std::span<const double> x, int n_out) {
  int n = static_cast<int>(x.size());
  std::vector<double> out(n_out, 0.0);
  for (int k = 0; k < n_out; ++k) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += x[i] * std::cos(M_PI * k * (i + 0.5) / n);
    out[k] = acc;
  }
  return out;
}
}  // namespace detail

// Full short-time analysis chain: Hamming window, zero-padded DFT,
// equal-height triangular filter bank on the warped axis, log, DCT, and
// finite-difference deltas over neighbor frames.
inline std::vector<FeatureFrame> mfcc_describe(std::span<const double> samples,
                                               const MfccConfig& cfg = {}) {
  int win = static_cast<int>(std::lround(cfg.window_s * cfg.sample_rate));
  int hop = static_cast<int>(std::lround(cfg.hop_s * cfg.sample_rate));
  if (static_cast<int>(samples.size()) < win)
    throw std::invalid_argument("mfcc_describe: audio shorter than one window");

  auto bank = mel_filter_bank(cfg.n_filters, cfg.n_fft, cfg.sample_rate, 0.0,
                              cfg.sample_rate / 2.0, cfg.mel);
  std::vector<double> hamming(win);
  for (int i = 0; i < win; ++i) hamming[i] = 0.54 - 0.46 * std::cos(2 * M_PI * i / (win - 1));

  RealFft fft(cfg.n_fft);
  int n_frames = (static_cast<int>(samples.size()) - win) / hop + 1;
  std::vector<FeatureFrame> frames(n_frames);
  std::vector<double> buf(win);
  for (int t = 0; t < n_frames; ++t) {
    double energy = 0;
    for (int i = 0; i < win; ++i) {
      double s = samples[static_cast<std::size_t>(t) * hop + i];
      energy += s * s;
      buf[i] = s * hamming[i];
    }
    auto mag = fft.magnitude(buf);
    std::vector<double> log_e(bank.size());
    for (std::size_t m = 0; m < bank.size(); ++m) {
      double acc = 0;
      for (std::size_t k = 0; k < mag.size(); ++k) acc += bank[m][k] * mag[k] * mag[k];
      log_e[m] = std::log(std::max(acc, 1e-12));
    }
    auto ceps = detail::dct2(log_e, FeatureFrame::kCoeffs);
    std::copy(ceps.begin(), ceps.end(), frames[t].mfcc.begin());
    frames[t].time = static_cast<double>(t) * hop / cfg.sample_rate;
    frames[t].energy = energy / win;
  }

  auto diff = [&](auto get, auto set) {
    for (int t = 0; t < n_frames; ++t) {
      int prev = std::max(t - 1, 0), next = std::min(t + 1, n_frames - 1);
      for (int c = 0; c < FeatureFrame::kCoeffs; ++c)
        set(frames[t], c, (get(frames[next], c) - get(frames[prev], c)) / 2.0);
    }
  };
  diff([](const FeatureFrame& f, int c) { return f.mfcc[c]; },
       [](FeatureFrame& f, int c, double v) { f.delta[c] = v; });
  diff([](const FeatureFrame& f, int c) { return f.delta[c]; },
       [](FeatureFrame& f, int c, double v) { f.delta2[c] = v; });
  return frames;
}

}  // namespace vom::audio
