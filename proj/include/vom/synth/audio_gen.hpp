#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "vom/audio/mel.hpp"
#include "vom/audio/mfcc.hpp"
#include "vom/audio/turns.hpp"
#include "vom/core/media.hpp"
#include "vom/synth/script.hpp"
#include "vom/util.hpp"

namespace vom::synth {

struct AudioTruth {
  core::WavData wav;  // mono mix at 16 kHz
  std::vector<audio::LabeledSegment> timeline;
};

namespace detail {

inline std::vector<double> render_voice(const VoiceProfile& v, double seconds, int fs,
                                        std::mt19937_64& rng) {
  int n = static_cast<int>(std::lround(seconds * fs));
  std::vector<double> out(n, 0.0);
  std::vector<double> gains(static_cast<std::size_t>(v.harmonics));
  std::vector<double> phases(gains.size());
  double norm = 0;
  for (int k = 0; k < v.harmonics; ++k) {
    gains[k] = std::pow(k + 1.0, -v.harmonic_decay);
    if ((k + 1) * v.f0 > fs / 2.0 - 200.0) gains[k] = 0;
    norm += gains[k] * gains[k];
    // fixed golden-ratio phases; adjacent harmonics are unresolved at a
    // 25 ms window, so per-span random phases would shift the short-time
    // envelope between spans of the same speaker
    double frac = std::fmod((k + 1) * 0.6180339887498949, 1.0);
    phases[k] = 2 * M_PI * frac;
  }
  norm = std::sqrt(std::max(norm, 1e-12));
  std::normal_distribution<double> gauss(0.0, 1.0);
  double prev_w = 0, lp = 0;
  const double vib_rate = 0.8, vib_depth = 0.015;
  for (int i = 0; i < n; ++i) {
    double t = i / static_cast<double>(fs);
    // integral of f0*(1 + depth*sin(2 pi rate tau)) keeps the vibrato bounded
    double phase_base =
        v.f0 * (t - vib_depth * (std::cos(2 * M_PI * vib_rate * t) - 1.0) / (2 * M_PI * vib_rate));
    double s = 0;
    for (int k = 0; k < v.harmonics; ++k)
      if (gains[k] > 0) s += gains[k] * std::sin(2 * M_PI * (k + 1) * phase_base + phases[k]);
    s /= norm;
    double w = gauss(rng);
    double shaped;
    if (v.noise_tilt >= 0) {
      shaped = w - v.noise_tilt * prev_w;  // brighten
    } else {
      double alpha = std::clamp(1.0 + v.noise_tilt, 0.05, 1.0);
      lp = alpha * w + (1 - alpha) * lp;  // darken
      shaped = lp;
    }
    prev_w = w;
    double am = 1.0 + 0.2 * std::sin(2 * M_PI * 3.1 * t);
    out[i] = v.level * am * (s + v.noise_gain * shaped);
  }
  return out;
}

// Long-term log envelope in warped bands, zero-mean; used to refuse
// profiles a diarizer could not possibly separate.
inline std::vector<double> profile_envelope(const VoiceProfile& v, std::uint64_t seed) {
  auto rng = make_rng(seed, 0xE0);
  auto sig = render_voice(v, 0.5, 16000, rng);
  audio::RealFft fft(512);
  auto bank = audio::mel_filter_bank(26, 512, 16000, 0, 8000);
  std::vector<double> acc(bank.size(), 0.0);
  for (std::size_t off = 0; off + 512 <= sig.size(); off += 256) {
    auto mag = fft.magnitude(std::span<const double>(sig).subspan(off, 512));
    for (std::size_t m = 0; m < bank.size(); ++m) {
      double e = 0;
      for (std::size_t k = 0; k < mag.size(); ++k) e += bank[m][k] * mag[k] * mag[k];
      acc[m] += e;
    }
  }
  double mean = 0;
  for (auto& e : acc) {
    e = std::log(std::max(e, 1e-12));
    mean += e;
  }
  mean /= static_cast<double>(acc.size());
  for (auto& e : acc) e -= mean;
  return acc;
}

}  // namespace detail

inline constexpr double kMinProfileDistance = 1.5;

inline AudioTruth generate_audio(const SessionScript& script, std::uint64_t seed) {
  if (script.speech.empty() || script.audio_s <= 0)
    throw std::invalid_argument("generate_audio: zero-length script");
  for (const auto& span : script.speech) {
    if (!script.find(span.speaker))
      throw std::invalid_argument("generate_audio: unknown speaker '" + span.speaker + "'");
    if (span.t1 <= span.t0 || span.t1 > script.audio_s)
      throw std::invalid_argument("generate_audio: bad span for '" + span.speaker + "'");
  }

  // pairwise spectral separation check over the speakers that actually talk
  std::vector<const PersonScript*> speakers;
  for (const auto& p : script.people)
    for (const auto& span : script.speech)
      if (span.speaker == p.who.id) {
        speakers.push_back(&p);
        break;
      }
  std::vector<std::vector<double>> envs;
  for (const auto* p : speakers) envs.push_back(detail::profile_envelope(p->voice, seed));
  for (std::size_t i = 0; i < envs.size(); ++i)
    for (std::size_t j = i + 1; j < envs.size(); ++j) {
      double d = 0;
      for (std::size_t m = 0; m < envs[i].size(); ++m) {
        double dd = envs[i][m] - envs[j][m];
        d += dd * dd;
      }
      if (std::sqrt(d) < kMinProfileDistance)
        throw std::invalid_argument("generate_audio: voice profiles of '" +
                                    speakers[i]->who.id + "' and '" + speakers[j]->who.id +
                                    "' are too similar");
    }

  const int fs = 16000;
  int total = static_cast<int>(std::lround(script.audio_s * fs));
  std::vector<double> mix(total, 0.0);

  int stream = 0;
  for (const auto* p : speakers) {
    auto rng = make_rng(seed, 0xA0 + static_cast<std::uint64_t>(stream++));
    for (const auto& span : script.speech) {
      if (span.speaker != p->who.id) continue;
      auto voice = detail::render_voice(p->voice, span.t1 - span.t0, fs, rng);
      int off = static_cast<int>(std::lround(span.t0 * fs));
      int ramp = fs * 3 / 100;  // 30 ms attack/release
      for (std::size_t i = 0; i < voice.size(); ++i) {
        int idx = off + static_cast<int>(i);
        if (idx >= total) break;
        double env = 1.0;
        if (static_cast<int>(i) < ramp) env = i / static_cast<double>(ramp);
        int tail = static_cast<int>(voice.size()) - 1 - static_cast<int>(i);
        if (tail < ramp) env = std::min(env, tail / static_cast<double>(ramp));
        mix[idx] += voice[i] * env;
      }
    }
  }

  // quiet room noise, ~-50 dB relative to full scale
  auto noise_rng = make_rng(seed, 0xBF);
  std::normal_distribution<double> gauss(0.0, 0.003);
  for (auto& s : mix) s += gauss(noise_rng);

  double peak = 0;
  for (double s : mix) peak = std::max(peak, std::abs(s));
  if (peak > 0.95)
    for (auto& s : mix) s *= 0.95 / peak;

  AudioTruth out;
  out.wav.sample_rate = fs;
  out.wav.channels = {std::move(mix)};
  for (const auto& span : script.speech)
    out.timeline.push_back({span.t0, span.t1, span.speaker});
  return out;
}

// Stock voice assignments, mutually distinct well past the separation floor.
inline VoiceProfile stock_voice(int index) {
  static const VoiceProfile profiles[] = {
      {105.0, 0.45, 26, 0.05, -0.6, 0.33},
      {205.0, 1.35, 14, 0.10, 0.7, 0.33},
      {150.0, 0.90, 5, 0.30, 0.2, 0.33},
      {125.0, 0.20, 30, 0.03, -0.9, 0.30},
      {230.0, 1.80, 8, 0.22, 0.9, 0.33},
      {170.0, 0.65, 18, 0.08, -0.3, 0.33},
  };
  return profiles[index % 6];
}

}  // namespace vom::synth
