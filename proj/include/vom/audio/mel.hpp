#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vom::audio {

// Parameters of the log frequency warping used by the cepstral features.
// Defaults give the familiar 2595*log10(1 + f/700) curve.
struct MelScaleConfig {
  double break_hz = 700.0;
  double scale_const = 2595.0;
  double log_base = 10.0;
};

inline void validate(const MelScaleConfig& cfg) {
  if (cfg.break_hz <= 0 || cfg.scale_const <= 0 || cfg.log_base <= 1)
    throw std::invalid_argument("invalid mel scale configuration");
}

inline double hz_to_mel(double f, const MelScaleConfig& cfg = {}) {
  if (f < 0) throw std::invalid_argument("hz_to_mel: negative frequency");
  return cfg.scale_const * std::log1p(f / cfg.break_hz) / std::log(cfg.log_base);
}

inline double mel_to_hz(double mel, const MelScaleConfig& cfg = {}) {
  return cfg.break_hz * (std::pow(cfg.log_base, mel / cfg.scale_const) - 1.0);
}

// Triangular equal-height filters with boundary points equally spaced on
// the warped axis. Each row holds weights over the spectrum bins
// [0, n_fft/2].
inline std::vector<std::vector<double>> mel_filter_bank(int n_filters, int n_fft,
                                                        double sample_rate, double f_lo,
                                                        double f_hi,
                                                        const MelScaleConfig& cfg = {}) {
  validate(cfg);
  if (n_filters < 1 || f_lo < 0 || f_hi <= f_lo)
    throw std::invalid_argument("mel_filter_bank: bad filter layout");
  int n_bins = n_fft / 2 + 1;
  double mel_lo = hz_to_mel(f_lo, cfg), mel_hi = hz_to_mel(f_hi, cfg);
  std::vector<double> edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_filters + 1), cfg);

  std::vector<std::vector<double>> bank(n_filters, std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < n_filters; ++m) {
    double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      double f = k * sample_rate / n_fft;
      if (f <= left || f >= right) continue;
      bank[m][k] = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
    }
  }
  return bank;
}

}  // namespace vom::audio
