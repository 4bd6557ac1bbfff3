#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "vom/core/manifest.hpp"
#include "vom/core/media.hpp"
#include "vom/core/report.hpp"

using namespace vom;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("vom_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

core::SessionManifest minimal_manifest(const fs::path& dir) {
  core::SessionManifest m;
  m.session_id = "vs001";
  m.case_id = "c001";
  m.encounter = core::EncounterKind::individual;
  m.participants = {
      {"m1", core::Role::mediator, 2, 2, ""},
      {"p1", core::Role::victim, 1, 1, ""},
  };
  m.camera = {160, 120, 290, 290};
  m.audio_path = "audio.wav";
  m.rgb_dir = "rgb";
  m.depth_dir = "depth";
  m.frame_count = 3;
  m.fps = 12;
  m.gaze_ranges = {
      {"m1", 5, 60, "p1"},
      {"p1", -60, -5, "m1"},
  };
  core::Participant cp;
  cp.id = "counterpart";
  cp.gender = 2;
  cp.age_band = 3;
  m.counterpart = cp;
  m.base_dir = dir;
  return m;
}

void write_media(const core::SessionManifest& m) {
  fs::create_directories(m.rgb_path());
  fs::create_directories(m.depth_path());
  core::WavData wav;
  wav.channels = {std::vector<double>(1600, 0.0)};
  core::write_wav(wav, m.audio_file());
  for (int i = 0; i < m.frame_count; ++i) {
    ImageU8 rgb(16, 12, 3);
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 16; ++x)
        rgb.at(x, y, 0) = static_cast<std::uint8_t>((x * 17 + y * 3 + i) & 0xff);
    ImageU16 depth(16, 12, 1, 1500);
    core::write_png_rgb(rgb, m.rgb_path() / core::frame_name(i, "png"));
    core::write_pgm16(depth, m.depth_path() / core::frame_name(i, "pgm"));
  }
}

}  // namespace

TEST_CASE("manifest saves and reloads identically") {
  auto dir = temp_dir("manifest_rt");
  auto m = minimal_manifest(dir);
  write_media(m);
  core::save_manifest(m, dir / "manifest.txt");
  auto loaded = core::load_manifest(dir / "manifest.txt");
  CHECK(loaded == m);
  CHECK(loaded.parties().size() == 1);
  CHECK(loaded.mediators().size() == 1);
}

TEST_CASE("manifest cardinality invariants") {
  auto dir = temp_dir("manifest_card");
  auto m = minimal_manifest(dir);
  write_media(m);

  SECTION("three parties in an individual encounter is rejected") {
    m.participants.push_back({"p2", core::Role::offender, 2, 2, ""});
    m.participants.push_back({"p3", core::Role::victim, 1, 2, ""});
    core::save_manifest(m, dir / "bad.txt");
    CHECK_THROWS_AS(core::load_manifest(dir / "bad.txt"), core::ManifestInvariantError);
  }
  SECTION("joint encounter needs two parties") {
    m.encounter = core::EncounterKind::joint;
    core::save_manifest(m, dir / "bad.txt");
    CHECK_THROWS_AS(core::load_manifest(dir / "bad.txt"), core::ManifestInvariantError);
  }
  SECTION("overlapping gaze ranges are rejected") {
    m.gaze_ranges.push_back({"p1", -20, 30, "m1"});
    core::save_manifest(m, dir / "bad.txt");
    CHECK_THROWS_AS(core::load_manifest(dir / "bad.txt"), core::ManifestInvariantError);
  }
  SECTION("missing media is its own error") {
    fs::remove(m.audio_file());
    core::save_manifest(m, dir / "manifest.txt");
    CHECK_THROWS_AS(core::load_manifest(dir / "manifest.txt"), core::MissingMediaError);
  }
  SECTION("garbage line is a parse error") {
    std::ofstream(dir / "bad.txt") << "nonsense_key 12\n";
    CHECK_THROWS_AS(core::load_manifest(dir / "bad.txt"), core::ManifestParseError);
  }
}

TEST_CASE("threshold validation warns by default and throws in strict mode") {
  auto dir = temp_dir("manifest_thresh");
  auto m = minimal_manifest(dir);
  m.thresholds.center_gate_px = 200;  // outside [50,120]
  write_media(m);
  core::save_manifest(m, dir / "manifest.txt");
  std::vector<std::string> warnings;
  auto loaded =
      core::load_manifest(dir / "manifest.txt", core::ThresholdPolicy::warn, true, &warnings);
  CHECK(loaded.thresholds.center_gate_px == 200);
  REQUIRE(warnings.size() == 1);
  CHECK_THROWS_AS(core::load_manifest(dir / "manifest.txt", core::ThresholdPolicy::strict),
                  core::ManifestInvariantError);
}

TEST_CASE("wav round trip preserves 16-bit samples") {
  auto dir = temp_dir("wav");
  core::WavData wav;
  wav.sample_rate = 16000;
  wav.channels.resize(2);
  for (int i = 0; i < 500; ++i) {
    wav.channels[0].push_back(std::sin(2 * M_PI * 440 * i / 16000.0) * 0.5);
    wav.channels[1].push_back(std::cos(2 * M_PI * 220 * i / 16000.0) * 0.25);
  }
  core::write_wav(wav, dir / "t.wav");
  auto back = core::read_wav(dir / "t.wav");
  REQUIRE(back.channels.size() == 2);
  REQUIRE(back.channels[0].size() == 500);
  CHECK(back.sample_rate == 16000);
  for (int i = 0; i < 500; ++i)
    CHECK_THAT(back.channels[0][i],
               Catch::Matchers::WithinAbs(wav.channels[0][i], 1.0 / 32768.0));
}

TEST_CASE("pgm and png round trips are exact") {
  auto dir = temp_dir("img");
  ImageU16 depth(20, 10, 1);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) depth.at(x, y) = static_cast<std::uint16_t>(x * 1000 + y);
  core::write_pgm16(depth, dir / "d.pgm");
  CHECK(core::read_pgm16(dir / "d.pgm") == depth);

  ImageU8 rgb(20, 10, 3);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x)
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = static_cast<std::uint8_t>(x * 7 + y * 11 + c);
  core::write_png_rgb(rgb, dir / "c.png");
  CHECK(core::read_png_rgb(dir / "c.png") == rgb);
}

TEST_CASE("frame stream yields ordered registered pairs") {
  auto dir = temp_dir("frames");
  auto m = minimal_manifest(dir);
  write_media(m);

  SECTION("single frame range") {
    auto stream = core::load_frames(m, 0, 0);
    auto fb = stream.next();
    REQUIRE(fb.has_value());
    CHECK(fb->index == 0);
    CHECK_FALSE(stream.next().has_value());
  }
  SECTION("full session in order") {
    auto stream = core::load_frames(m);
    int expect = 0;
    while (auto fb = stream.next()) CHECK(fb->index == expect++);
    CHECK(expect == 3);
  }
  SECTION("missing depth frame names the index") {
    fs::remove(m.depth_path() / core::frame_name(1, "pgm"));
    auto stream = core::load_frames(m);
    CHECK(stream.next().has_value());
    try {
      stream.next();
      FAIL("expected MissingFrameError");
    } catch (const core::MissingFrameError& e) {
      CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
  }
  SECTION("range outside recorded frames") {
    CHECK_THROWS_AS(core::load_frames(m, 0, 99), core::MissingFrameError);
  }
  SECTION("dimension mismatch is detected") {
    core::write_pgm16(ImageU16(8, 8, 1, 100), m.depth_path() / core::frame_name(0, "pgm"));
    auto stream = core::load_frames(m);
    CHECK_THROWS_AS(stream.next(), core::DimensionMismatchError);
  }
}

TEST_CASE("report round trips bit-exact") {
  auto dir = temp_dir("report");
  std::vector<core::ReportRow> rows;
  for (int i = 0; i < 28; ++i) {
    core::ReportRow r;
    r.sample.session_id = "vs" + std::to_string(i);
    r.sample.party_id = "p1";
    for (int f = 0; f < ind::kFeatureCount; ++f)
      r.sample.features[f] = f == 22 && i % 5 == 0 ? std::nan("") : 0.1 * i + f * 1.0 / 3.0;
    r.sample.receptivity = i % 5 + 1;
    r.sample.agreement = (i + 1) % 5 + 1;
    r.sample.satisfaction = (i + 2) % 5 + 1;
    r.pred_receptivity = 2.5;
    rows.push_back(r);
  }
  core::save_report(rows, dir / "report.csv");
  auto back = core::load_report(dir / "report.csv");
  REQUIRE(back.size() == 28);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].sample.session_id == rows[i].sample.session_id);
    for (int f = 0; f < ind::kFeatureCount; ++f) {
      if (rows[i].sample.features.missing(f)) CHECK(back[i].sample.features.missing(f));
      else CHECK(back[i].sample.features[f] == rows[i].sample.features[f]);
    }
    CHECK(back[i].sample.receptivity == rows[i].sample.receptivity);
  }
  // saving the reloaded rows writes identical bytes
  core::save_report(back, dir / "report2.csv");
  std::ifstream a(dir / "report.csv", std::ios::binary), b(dir / "report2.csv", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);

  SECTION("empty list is rejected") {
    CHECK_THROWS_AS(core::save_report({}, dir / "x.csv"), core::ReportIoError);
  }
}
