#include <catch2/catch_amalgamated.hpp>

#include "diar_helpers.hpp"
#include "vom/synth/audio_gen.hpp"

using namespace vom;

namespace {

synth::SessionScript conversation(const std::vector<std::vector<double>>& spans_per_speaker,
                                  double audio_s) {
  synth::SessionScript s;
  s.session_id = "diartest";
  s.case_id = "c";
  s.audio_s = audio_s;
  static const char* ids[] = {"m1", "p1", "p2"};
  static const core::Role roles[] = {core::Role::mediator, core::Role::victim,
                                     core::Role::offender};
  for (std::size_t i = 0; i < spans_per_speaker.size(); ++i) {
    synth::PersonScript p;
    p.who = {ids[i], roles[i], 1, 2, ""};
    p.seat = static_cast<int>(i);
    p.voice = synth::stock_voice(static_cast<int>(i));
    s.people.push_back(p);
    for (std::size_t j = 0; j + 1 < spans_per_speaker[i].size(); j += 2)
      s.speech.push_back({ids[i], spans_per_speaker[i][j], spans_per_speaker[i][j + 1]});
  }
  return s;
}

std::vector<audio::FeatureFrame> features_of(const synth::SessionScript& s, std::uint64_t seed,
                                             std::vector<audio::LabeledSegment>* truth = nullptr) {
  auto gen = synth::generate_audio(s, seed);
  if (truth) *truth = gen.timeline;
  return audio::mfcc_describe(gen.wav.channels[0]);
}

// Handmade feature frames with a constant-plus-noise static cepstrum.
std::vector<audio::FeatureFrame> synthetic_frames(const std::vector<int>& labels,
                                                  std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<audio::FeatureFrame> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int c = 0; c < audio::FeatureFrame::kCoeffs; ++c) {
      out[i].mfcc[c] = (labels[i] ? 8.0 : -8.0) * (c == 0 || c == 3 ? 1.0 : 0.1) + g(rng);
      out[i].delta[c] = 0.2 * g(rng);
      out[i].delta2[c] = 0.1 * g(rng);
    }
    out[i].energy = 1.0;
    out[i].time = 0.01 * static_cast<double>(i);
  }
  return out;
}

}  // namespace

TEST_CASE("glr stays silent on a homogeneous speaker") {
  auto s = conversation({{0.5, 11.5}}, 12.0);
  auto frames = features_of(s, 7);
  auto boundaries = audio::glr_segment(frames);
  CHECK(boundaries.empty());
}

TEST_CASE("glr finds a two-speaker change near its scripted time") {
  auto s = conversation({{0.2, 10.0}, {10.0, 19.8}}, 20.0);
  auto frames = features_of(s, 11);
  auto boundaries = audio::glr_segment(frames);
  REQUIRE_FALSE(boundaries.empty());
  double closest = 1e9;
  for (double b : boundaries) closest = std::min(closest, std::abs(b - 10.0));
  CHECK(closest <= 0.5);
}

TEST_CASE("glr recovers three scripted changes") {
  auto s = conversation({{0.2, 8.0, 16.0, 24.0}, {8.0, 16.0, 24.0, 31.8}}, 32.0);
  auto frames = features_of(s, 13);
  auto boundaries = audio::glr_segment(frames);
  CHECK(boundaries.size() >= 3);
  for (double truth : {8.0, 16.0, 24.0}) {
    double closest = 1e9;
    for (double b : boundaries) closest = std::min(closest, std::abs(b - truth));
    CHECK(closest <= 0.5);
  }
}

TEST_CASE("glr boundaries mirror when the features are reversed") {
  auto s = conversation({{0.2, 10.0}, {10.0, 19.8}}, 20.0);
  auto frames = features_of(s, 17);
  auto fwd = audio::glr_segment(frames);
  std::vector<audio::FeatureFrame> rev(frames.rbegin(), frames.rend());
  for (std::size_t i = 0; i < rev.size(); ++i) rev[i].time = 0.01 * static_cast<double>(i);
  auto bwd = audio::glr_segment(rev);
  double total = static_cast<double>(frames.size()) * 0.01;
  REQUIRE(fwd.size() == bwd.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    double mirrored = total - bwd[bwd.size() - 1 - i];
    CHECK_THAT(fwd[i], Catch::Matchers::WithinAbs(mirrored, 0.21));
  }
}

TEST_CASE("glr requires enough material") {
  auto s = conversation({{0.1, 3.9}}, 4.0);
  auto frames = features_of(s, 3);
  CHECK_THROWS_AS(audio::glr_segment(frames), std::invalid_argument);
}

TEST_CASE("bic merges two segments drawn from one distribution") {
  auto frames = synthetic_frames(std::vector<int>(600, 0), 5);
  std::vector<audio::TimeSegment> segs;
  segs.push_back({0.0, 3.0, -1, 0, 300});
  segs.push_back({3.0, 6.0, -1, 300, 600});
  auto tl = audio::bic_cluster(frames, segs);
  CHECK(tl.cluster_count() == 1);
}

TEST_CASE("bic keeps distinct speakers apart and a single segment is identity") {
  std::vector<int> labels(600, 0);
  for (int i = 300; i < 600; ++i) labels[i] = 1;
  auto frames = synthetic_frames(labels, 6);
  std::vector<audio::TimeSegment> segs;
  segs.push_back({0.0, 3.0, -1, 0, 300});
  segs.push_back({3.0, 6.0, -1, 300, 600});
  auto tl = audio::bic_cluster(frames, segs);
  CHECK(tl.cluster_count() == 2);

  auto single = audio::bic_cluster(frames, {audio::TimeSegment{0.0, 6.0, -1, 0, 600}});
  REQUIRE(single.segments.size() == 1);
  CHECK(single.cluster_count() == 1);
  CHECK(single.segments[0].f_start == 0);
  CHECK(single.segments[0].f_end == 600);
}

TEST_CASE("bic never outputs more clusters than input segments") {
  std::vector<int> labels;
  for (int i = 0; i < 500; ++i) labels.push_back((i / 100) % 2);
  auto frames = synthetic_frames(labels, 9);
  std::vector<audio::TimeSegment> segs;
  for (int i = 0; i < 5; ++i)
    segs.push_back({i * 1.0, (i + 1) * 1.0, -1, i * 100, (i + 1) * 100});
  auto tl = audio::bic_cluster(frames, segs);
  CHECK(tl.cluster_count() <= 5);
  CHECK(tl.cluster_count() == 2);
}

TEST_CASE("viterbi is a fixed point at the likelihood optimum") {
  std::vector<int> labels(400, 0);
  for (int i = 200; i < 400; ++i) labels[i] = 1;
  auto frames = synthetic_frames(labels, 21);
  audio::SpeakerTimeline tl;
  tl.segments.push_back({0.0, 2.0, 0, 0, 200});
  tl.segments.push_back({2.0, 4.0, 1, 200, 400});
  auto refined = audio::viterbi_refine(tl, frames);
  REQUIRE(refined.segments.size() == 2);
  CHECK(refined.segments[0].f_end == 200);
  CHECK(refined.segments[1].f_start == 200);
  CHECK(refined.cluster_models.size() == 2);
}

TEST_CASE("viterbi pulls a perturbed boundary back toward the truth") {
  // contiguous two-speaker audio, change scripted at t = 8
  auto s = conversation({{0.2, 8.0}, {8.0, 15.8}}, 16.0);
  auto frames = features_of(s, 22);
  int change = 800, offset = 30;  // +0.3 s perturbation
  audio::SpeakerTimeline tl;
  tl.segments.push_back({0.0, (change + offset) * 0.01, 0, 0, change + offset});
  tl.segments.push_back({(change + offset) * 0.01, frames.size() * 0.01, 1, change + offset,
                         static_cast<int>(frames.size())});
  auto refined = audio::viterbi_refine(tl, frames);
  REQUIRE(refined.segments.size() >= 2);
  // locate the refined change between the two clusters
  double boundary = 0;
  for (std::size_t i = 0; i + 1 < refined.segments.size(); ++i)
    if (refined.segments[i].cluster != refined.segments[i + 1].cluster) {
      boundary = refined.segments[i].t_end;
      break;
    }
  CHECK(std::abs(boundary - 8.0) < 0.3);
}

TEST_CASE("viterbi with one cluster emits a single covering segment") {
  auto frames = synthetic_frames(std::vector<int>(300, 0), 23);
  audio::SpeakerTimeline tl;
  tl.segments.push_back({0.0, 3.0, 0, 0, 300});
  auto refined = audio::viterbi_refine(tl, frames);
  REQUIRE(refined.segments.size() == 1);
  CHECK(refined.segments[0].f_start == 0);
  CHECK(refined.segments[0].f_end == 300);
}

TEST_CASE("viterbi drops clusters too small to model") {
  std::vector<int> labels(300, 0);
  auto frames = synthetic_frames(labels, 24);
  audio::SpeakerTimeline tl;
  tl.segments.push_back({0.0, 2.9, 0, 0, 290});
  tl.segments.push_back({2.9, 3.0, 1, 290, 300});  // 10 frames
  auto refined = audio::viterbi_refine(tl, frames);
  CHECK(refined.cluster_models.size() == 1);
  REQUIRE_FALSE(refined.notices.empty());
  CHECK(refined.notices[0].find("dropped") != std::string::npos);
}

TEST_CASE("full diarization of a three-speaker session") {
  auto s = conversation({{0.5, 6.0, 18.0, 24.0, 36.0, 41.5},
                         {6.3, 12.0, 24.3, 30.0},
                         {12.3, 18.0, 30.3, 36.0}},
                        42.0);
  std::vector<audio::LabeledSegment> truth;
  auto frames = features_of(s, 31, &truth);
  auto tl = audio::diarize(frames);
  CHECK(tl.cluster_count() == 3);
  CHECK(testutil::cluster_purity(truth, tl) >= 0.90);
  double der = testutil::diarization_error_rate(truth, tl);
  INFO("DER = " << der);
  CHECK(der <= 0.10);
}

TEST_CASE("rttm round trip") {
  audio::SpeakerTimeline tl;
  tl.segments.push_back({0.5, 2.5, 0, 50, 250});
  tl.segments.push_back({2.5, 4.0, 1, 250, 400});
  auto dir = std::filesystem::temp_directory_path() / "vom_test_rttm";
  std::filesystem::create_directories(dir);
  audio::save_rttm(tl, "vs1", dir / "t.rttm");
  auto back = audio::load_rttm(dir / "t.rttm");
  REQUIRE(back.segments.size() == 2);
  CHECK(back.segments[0].t_start == 0.5);
  CHECK(back.segments[0].cluster == 0);
  CHECK(back.segments[1].t_end == 4.0);
  CHECK(back.segments[1].f_start == 250);
}
