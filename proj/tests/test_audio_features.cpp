#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vom/audio/mfcc.hpp"

using namespace vom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("warped frequency scale spot values") {
  audio::MelScaleConfig cfg;  // 700 / 2595 / base 10

  CHECK(audio::hz_to_mel(0, cfg) == 0.0);

  // f = break frequency gives scale_const * log_n(2)
  CHECK_THAT(audio::hz_to_mel(700, cfg),
             WithinRel(2595.0 * std::log10(2.0), 1e-12));

  // independent evaluation of the closed form at 1000 Hz
  double oracle = 2595.0 * std::log10(1.0 + 1000.0 / 700.0);
  CHECK_THAT(audio::hz_to_mel(1000, cfg), WithinRel(oracle, 1e-12));
  CHECK_THAT(audio::hz_to_mel(1000, cfg), WithinAbs(999.99, 0.01));

  CHECK_THROWS_AS(audio::hz_to_mel(-1, cfg), std::invalid_argument);
}

TEST_CASE("warped scale is strictly increasing and inverts") {
  audio::MelScaleConfig cfg{500.0, 1000.0, 2.0};
  double prev = -1;
  for (double f = 0; f <= 8000; f += 37.5) {
    double m = audio::hz_to_mel(f, cfg);
    CHECK(m > prev);
    prev = m;
    CHECK_THAT(audio::mel_to_hz(m, cfg), WithinAbs(f, 1e-9));
  }
}

TEST_CASE("filter bank rows are triangular and equal height") {
  auto bank = audio::mel_filter_bank(26, 512, 16000, 0, 8000);
  REQUIRE(bank.size() == 26);
  int nonempty = 0;
  for (const auto& row : bank) {
    double peak = 0;
    for (double v : row) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
      peak = std::max(peak, v);
    }
    if (peak > 0) ++nonempty;
    CHECK(peak <= 1.0 + 1e-12);
  }
  CHECK(nonempty == 26);
}

TEST_CASE("mfcc frame count follows window/hop arithmetic") {
  // 1 s at 16 kHz, 25 ms window, 10 ms hop -> floor((1000-25)/10)+1 = 98
  std::vector<double> tone(16000);
  for (int i = 0; i < 16000; ++i) tone[i] = 0.4 * std::sin(2 * M_PI * 440 * i / 16000.0);
  auto frames = audio::mfcc_describe(tone);
  CHECK(frames.size() == 98);
  for (const auto& f : frames)
    for (int c = 0; c < audio::FeatureFrame::kCoeffs; ++c) {
      CHECK(std::isfinite(f.mfcc[c]));
      CHECK(std::isfinite(f.delta[c]));
      CHECK(std::isfinite(f.delta2[c]));
    }
}

TEST_CASE("audio shorter than a window is rejected") {
  std::vector<double> tiny(100, 0.1);
  CHECK_THROWS_AS(audio::mfcc_describe(tiny), std::invalid_argument);
}

TEST_CASE("DC signal concentrates energy in the lowest filters") {
  audio::MfccConfig cfg;
  std::vector<double> dc(16000, 0.5);
  auto bank = audio::mel_filter_bank(cfg.n_filters, cfg.n_fft, cfg.sample_rate, 0, 8000);
  audio::RealFft fft(cfg.n_fft);
  // windowed DC: spectral mass at bin 0 smears only into the first filters
  std::vector<double> buf(400);
  for (int i = 0; i < 400; ++i)
    buf[i] = 0.5 * (0.54 - 0.46 * std::cos(2 * M_PI * i / 399.0));
  auto mag = fft.magnitude(buf);
  std::vector<double> energies(bank.size(), 0.0);
  for (std::size_t m = 0; m < bank.size(); ++m)
    for (std::size_t k = 0; k < mag.size(); ++k) energies[m] += bank[m][k] * mag[k] * mag[k];
  double low = energies[0] + energies[1];
  double high = 0;
  for (std::size_t m = 2; m < energies.size(); ++m) high += energies[m];
  CHECK(low > 100 * high);

  // and the cepstrum is c0 dominant
  auto frames = audio::mfcc_describe(dc, cfg);
  for (int c = 1; c < audio::FeatureFrame::kCoeffs; ++c)
    CHECK(std::abs(frames[0].mfcc[0]) > std::abs(frames[0].mfcc[c]));
}

TEST_CASE("unit impulse has a flat magnitude spectrum") {
  audio::RealFft fft(512);
  std::vector<double> impulse(512, 0.0);
  impulse[0] = 1.0;
  auto mag = fft.magnitude(impulse);
  for (double v : mag) CHECK_THAT(v, WithinAbs(1.0, 1e-12));
}

TEST_CASE("delta of a constant feature sequence is zero") {
  // constant signal -> identical frames -> finite differences vanish
  std::vector<double> dc(8000, 0.3);
  auto frames = audio::mfcc_describe(dc);
  for (const auto& f : frames)
    for (int c = 0; c < audio::FeatureFrame::kCoeffs; ++c) {
      CHECK_THAT(f.delta[c], WithinAbs(0.0, 1e-9));
      CHECK_THAT(f.delta2[c], WithinAbs(0.0, 1e-9));
    }
}
