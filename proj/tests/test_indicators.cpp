#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "indicator_oracle.hpp"
#include "vom/indicators/assemble.hpp"

using namespace vom;
using Catch::Matchers::WithinAbs;

namespace {

core::SessionManifest joint_manifest() {
  core::SessionManifest m;
  m.session_id = "vs_joint";
  m.case_id = "c1";
  m.encounter = core::EncounterKind::joint;
  m.participants = {
      {"m1", core::Role::mediator, 2, 2, ""},
      {"p1", core::Role::victim, 1, 1, ""},
      {"p2", core::Role::offender, 2, 3, ""},
  };
  m.camera = {160, 120, 290, 290};
  m.frame_count = 100;
  // disjoint bands per gazer
  m.gaze_ranges = {
      {"m1", -40, -10, "p1"}, {"m1", 10, 40, "p2"},
      {"p1", -10, 15, "m1"},  {"p1", 15, 45, "p2"},
      {"p2", -15, 10, "m1"},  {"p2", -45, -15, "p1"},
  };
  return m;
}

core::SessionManifest individual_manifest() {
  core::SessionManifest m;
  m.session_id = "vs_ind";
  m.case_id = "c2";
  m.encounter = core::EncounterKind::individual;
  m.participants = {
      {"m1", core::Role::mediator, 1, 3, ""},
      {"p1", core::Role::offender, 2, 2, ""},
  };
  m.camera = {160, 120, 290, 290};
  m.frame_count = 100;
  m.gaze_ranges = {
      {"m1", -40, -10, "p1"},
      {"p1", -10, 15, "m1"},
  };
  core::Participant cp;
  cp.id = "counterpart";
  cp.gender = 1;
  cp.age_band = 2;
  m.counterpart = cp;
  return m;
}

body::Point3D pt(double x, double y, double z) { return {x, y, z}; }

}  // namespace

TEST_CASE("gaze codes follow the role table") {
  auto m = joint_manifest();
  // p1 at angle 0 -> mediator; p1 at 30 -> other party; m1 at -20 -> party p1
  CHECK(ind::codify_one(m, "p1", 0.0).code == ind::GazeCode::at_mediator);
  CHECK(ind::codify_one(m, "p1", 30.0).code == ind::GazeCode::other_party);
  CHECK(ind::codify_one(m, "p1", 30.0).target_party == "p2");
  CHECK(ind::codify_one(m, "m1", -20.0).code == ind::GazeCode::at_party);
  CHECK(ind::codify_one(m, "m1", -20.0).target_party == "p1");
  CHECK(ind::codify_one(m, "p1", 80.0).code == ind::GazeCode::none);  // outside all ranges
}

TEST_CASE("mediator-to-mediator gaze is discarded") {
  auto m = joint_manifest();
  m.participants.push_back({"m2", core::Role::mediator, 1, 1, ""});
  m.gaze_ranges.push_back({"m1", 50, 70, "m2"});
  CHECK(ind::codify_one(m, "m1", 60.0).code == ind::GazeCode::none);
}

TEST_CASE("companions codify as same-party targets") {
  auto m = joint_manifest();
  m.participants.push_back({"q1", core::Role::companion, 1, 1, "p1"});
  m.gaze_ranges.push_back({"p1", -45, -20, "q1"});
  auto g = ind::codify_one(m, "p1", -30.0);
  CHECK(g.code == ind::GazeCode::same_party);
  CHECK(g.target_party == "p1");
}

TEST_CASE("every frame in the mediator range makes f4 full scale") {
  auto m = individual_manifest();
  std::vector<std::map<std::string, double>> poses(50);
  for (auto& frame : poses) frame["p1"] = 2.0;  // inside p1->m1 range
  auto gaze = ind::codify_gaze(m, poses);
  double pct = ind::gaze_time_pct(gaze, [](const auto& fr) {
    auto it = fr.find("p1");
    return it != fr.end() && it->second.code == ind::GazeCode::at_mediator;
  });
  CHECK(pct == 100.0);
}

TEST_CASE("individual encounters never emit other-party codes") {
  auto m = individual_manifest();
  std::vector<std::map<std::string, double>> poses(200);
  auto rng = make_rng(3);
  std::uniform_real_distribution<double> u(-90, 90);
  for (auto& frame : poses) {
    frame["p1"] = u(rng);
    frame["m1"] = u(rng);
  }
  auto gaze = ind::codify_gaze(m, poses);
  for (const auto& frame : gaze)
    for (const auto& [id, g] : frame) {
      CHECK(g.code != ind::GazeCode::other_party);
      CHECK(g.code != ind::GazeCode::same_party);
    }
}

TEST_CASE("scripted 60/40 gaze split reproduces the percentages") {
  auto m = joint_manifest();
  std::vector<std::map<std::string, double>> poses(100);
  for (int f = 0; f < 100; ++f)
    poses[static_cast<std::size_t>(f)]["p1"] = f < 60 ? 30.0 : 0.0;  // other vs mediator
  auto gaze = ind::codify_gaze(m, poses);
  double at_other = ind::gaze_time_pct(gaze, [](const auto& fr) {
    auto it = fr.find("p1");
    return it != fr.end() && it->second.code == ind::GazeCode::other_party;
  });
  double at_med = ind::gaze_time_pct(gaze, [](const auto& fr) {
    auto it = fr.find("p1");
    return it != fr.end() && it->second.code == ind::GazeCode::at_mediator;
  });
  CHECK_THAT(at_other, WithinAbs(60.0, 1e-9));
  CHECK_THAT(at_med, WithinAbs(40.0, 1e-9));
}

TEST_CASE("hand agitation arithmetic") {
  SECTION("stationary hands give zero") {
    std::vector<std::optional<ind::HandPair>> hands(10, std::make_pair(pt(0, 0, 1000), pt(100, 0, 1000)));
    auto a = ind::hand_agitation(hands, std::vector<bool>(10, true));
    CHECK(a.value == 0.0);
    CHECK(a.pairs == 9);
  }
  SECTION("both hands moving 10 mm per frame accumulate to 20") {
    std::vector<std::optional<ind::HandPair>> hands;
    for (int f = 0; f < 12; ++f)
      hands.push_back(std::make_pair(pt(10.0 * f, 0, 900), pt(200, 10.0 * f, 900)));
    auto a = ind::hand_agitation(hands, std::vector<bool>(12, true));
    CHECK_THAT(a.value, WithinAbs(20.0, 1e-9));
  }
  SECTION("gaze-conditioned equals unconditioned on the same subset") {
    auto rng = make_rng(7);
    std::uniform_real_distribution<double> u(-50, 50);
    std::vector<std::optional<ind::HandPair>> hands;
    std::vector<bool> subset;
    for (int f = 0; f < 40; ++f) {
      hands.push_back(std::make_pair(pt(u(rng), u(rng), 1000), pt(u(rng), u(rng), 1000)));
      subset.push_back(f % 3 == 0);
    }
    auto conditioned = ind::hand_agitation(hands, subset);
    std::vector<std::optional<ind::HandPair>> restricted;
    for (int f = 0; f < 40; ++f)
      if (subset[static_cast<std::size_t>(f)]) restricted.push_back(hands[static_cast<std::size_t>(f)]);
    auto plain = ind::hand_agitation(restricted, std::vector<bool>(restricted.size(), true));
    CHECK_THAT(conditioned.value, WithinAbs(plain.value, 1e-12));
  }
  SECTION("missing frames are excluded and reported") {
    std::vector<std::optional<ind::HandPair>> hands;
    for (int f = 0; f < 10; ++f) {
      if (f == 3 || f == 7) hands.push_back(std::nullopt);
      else hands.push_back(std::make_pair(pt(5.0 * f, 0, 800), pt(0, 5.0 * f, 800)));
    }
    auto a = ind::hand_agitation(hands, std::vector<bool>(10, true));
    CHECK(a.excluded_frames == 2);
    CHECK(a.pairs == 7);
  }
  SECTION("fewer than two usable frames is an error") {
    std::vector<std::optional<ind::HandPair>> hands(5);
    hands[2] = std::make_pair(pt(0, 0, 1), pt(1, 1, 1));
    CHECK_THROWS_AS(ind::hand_agitation(hands, std::vector<bool>(5, true)),
                    std::invalid_argument);
  }
}

TEST_CASE("body agitation is the subset mean") {
  std::vector<std::optional<double>> flow{0.0, 2.0, 4.0};
  auto a = ind::body_agitation(flow, std::vector<bool>(3, true));
  CHECK_THAT(a.value, WithinAbs(2.0, 1e-12));

  std::vector<std::optional<double>> constant(8, 3.25);
  CHECK_THAT(ind::body_agitation(constant, std::vector<bool>(8, true)).value,
             WithinAbs(3.25, 1e-12));

  CHECK_THROWS_AS(ind::body_agitation(flow, std::vector<bool>(3, false)),
                  std::invalid_argument);
}

TEST_CASE("posture classification and vote") {
  SECTION("upright every frame is normal") {
    std::vector<std::optional<double>> pitch(30, 1.5);
    CHECK(ind::posture_class(pitch) == ind::Posture::normal);
  }
  SECTION("60 percent forward wins the vote") {
    std::vector<std::optional<double>> pitch;
    for (int f = 0; f < 100; ++f) pitch.push_back(f < 60 ? 20.0 : 0.0);
    CHECK(ind::posture_class(pitch) == ind::Posture::tilted_forward);
  }
  SECTION("exact tie falls back to normal") {
    std::vector<std::optional<double>> pitch;
    for (int f = 0; f < 40; ++f) pitch.push_back(f < 20 ? 20.0 : -20.0);
    CHECK(ind::posture_class(pitch) == ind::Posture::normal);
  }
  SECTION("mostly invisible torso is an error") {
    std::vector<std::optional<double>> pitch(30);
    pitch[0] = 3.0;
    CHECK_THROWS_AS(ind::posture_class(pitch), std::invalid_argument);
  }
}

TEST_CASE("hand relations percentages and gates") {
  std::optional<body::Plane> no_table;
  SECTION("welded hands are together the whole session") {
    std::vector<std::optional<ind::HandPair>> hands(20, std::make_pair(pt(0, 0, 1000), pt(10, 0, 1000)));
    std::vector<std::optional<body::Point3D>> face(20, pt(0, -300, 1000));
    auto rel = ind::hand_relations(hands, face, no_table, 85.0);
    CHECK(rel.together_pct == 100.0);
    CHECK_FALSE(rel.under_table_pct.has_value());
  }
  SECTION("a quarter of the frames below the plane") {
    body::Plane table;  // horizontal surface at y = 300 (y grows downward)
    table.nx = 0, table.ny = 1, table.nz = 0, table.offset = 300;
    std::vector<std::optional<ind::HandPair>> hands;
    std::vector<std::optional<body::Point3D>> face;
    for (int f = 0; f < 80; ++f) {
      double y = f < 20 ? 400.0 : 100.0;  // first quarter under the table
      hands.push_back(std::make_pair(pt(-50, y, 1200), pt(50, y, 1200)));
      face.push_back(pt(0, -200, 1200));
    }
    auto rel = ind::hand_relations(hands, face, table, 85.0);
    REQUIRE(rel.under_table_pct.has_value());
    CHECK_THAT(*rel.under_table_pct, WithinAbs(25.0, 1e-9));
  }
  SECTION("hands that never approach the face leave the average missing") {
    std::vector<std::optional<ind::HandPair>> hands(15, std::make_pair(pt(-300, 400, 1500), pt(300, 400, 1500)));
    std::vector<std::optional<body::Point3D>> face(15, pt(0, -250, 1500));
    auto rel = ind::hand_relations(hands, face, no_table, 85.0);
    CHECK_FALSE(rel.touch_face_mean_mm.has_value());
  }
}

namespace {

// deterministic scripted log for a whole session
ind::SessionLog scripted_log(const core::SessionManifest& m, std::uint64_t seed, int frames) {
  ind::SessionLog log;
  log.frames.resize(static_cast<std::size_t>(frames));
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u01(0, 1);
  for (int f = 0; f < frames; ++f) {
    for (const auto& p : m.participants) {
      ind::PersonFrame pf;
      // cycle through this participant's gaze ranges plus off-target spells
      auto ranges = m.ranges_for(p.id);
      int slot = (f / 17 + static_cast<int>(p.id.back())) % (static_cast<int>(ranges.size()) + 1);
      if (slot < static_cast<int>(ranges.size()))
        pf.pose_deg = (ranges[static_cast<std::size_t>(slot)].angle_lo +
                       ranges[static_cast<std::size_t>(slot)].angle_hi) / 2.0;
      else
        pf.pose_deg = 85.0;
      if (u01(rng) > 0.07)
        pf.hands = std::make_pair(pt(-80 + 30 * std::sin(f * 0.21), 320 + 10 * std::cos(f * 0.4), 1500),
                                  pt(90 + 25 * std::sin(f * 0.17 + 1), 330, 1510));
      pf.face = pt(10 * std::sin(f * 0.1), -240, 1450);
      pf.flow = 0.4 + 0.3 * std::sin(f * 0.05) + 0.1 * u01(rng);
      pf.pitch_deg = f % 5 == 0 ? 14.0 : 2.0;
      log.frames[static_cast<std::size_t>(f)][p.id] = pf;
    }
  }
  body::Plane table;
  table.nx = 0.02, table.ny = 0.97, table.nz = -0.24, table.offset = 250;
  double norm = std::sqrt(table.nx * table.nx + table.ny * table.ny + table.nz * table.nz);
  table.nx /= norm, table.ny /= norm, table.nz /= norm;
  table.offset /= norm;
  log.table = table;
  double t = 0.4;
  int who = 0;
  auto ids = std::vector<std::string>();
  for (const auto& p : m.participants) ids.push_back(p.id);
  auto drng = make_rng(seed, 2);
  std::uniform_real_distribution<double> dur(1.0, 4.0), gap(-0.1, 0.6);
  for (int i = 0; i < 30; ++i) {
    double d = dur(drng);
    log.speech.push_back({t, t + d, ids[static_cast<std::size_t>(who) % ids.size()]});
    t += d + gap(drng);
    who += 1 + static_cast<int>(mix_seed(seed, static_cast<std::uint64_t>(i)) % (ids.size() - 1));
  }
  for (const auto* p : m.parties()) log.survey[p->id] = {3, 2};
  return log;
}

}  // namespace

TEST_CASE("assemble produces the fixed 36-entry layout") {
  auto m = joint_manifest();
  auto log = scripted_log(m, 42, 120);
  auto v1 = ind::assemble_vector(m, log, "p1");
  auto v2 = ind::assemble_vector(m, log, "p2");

  // joint encounter: one vector per party, shared session-level fields
  CHECK(v1[ind::feat::session_type] == 2.0);
  CHECK(v2[ind::feat::session_type] == 2.0);
  CHECK(v1[ind::feat::role] == 1.0);
  CHECK(v2[ind::feat::role] == 2.0);
  CHECK(v1[ind::feat::gender_other] == 2.0);
  CHECK(v2[ind::feat::gender_other] == 1.0);
  // the two samples disagree somewhere in the behavioral block
  bool differ = false;
  for (int i = 13; i < 22; ++i)
    if (!v1.missing(i) && !v2.missing(i) && v1[i] != v2[i]) differ = true;
  CHECK(differ);
}

TEST_CASE("assemble matches the brute-force oracle on scripted sessions") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    auto m = joint_manifest();
    auto log = scripted_log(m, seed, 150);
    for (const auto* party : m.parties()) {
      auto got = ind::assemble_vector(m, log, party->id);
      auto want = testutil::oracle_vector(m, log, party->id);
      INFO("seed " << seed << " party " << party->id);
      CHECK(testutil::oracle_mismatch(want, got) <= 1e-9);
    }
  }
  for (std::uint64_t seed : {21ULL, 22ULL}) {
    auto m = individual_manifest();
    auto log = scripted_log(m, seed, 140);
    auto got = ind::assemble_vector(m, log, "p1");
    auto want = testutil::oracle_vector(m, log, "p1");
    INFO("individual seed " << seed);
    CHECK(testutil::oracle_mismatch(want, got) <= 1e-9);
    // no other party in session: gaze-at-other agitation is missing,
    // demographics come from the case counterpart
    CHECK(got.missing(ind::feat::hand_agitation_at_other));
    CHECK(got[ind::feat::gender_other] == 1.0);
  }
}

TEST_CASE("gaze percentages of a participant sum to at most 100") {
  auto m = joint_manifest();
  auto log = scripted_log(m, 77, 130);
  auto v = ind::assemble_vector(m, log, "p1");
  double own = v[ind::feat::looks_other] + v[ind::feat::looks_mediator];
  CHECK(own <= 100.0 + 1e-9);
}

TEST_CASE("time-percentage features recombine from equal halves") {
  auto m = joint_manifest();
  auto log = scripted_log(m, 99, 160);
  ind::SessionLog first, second;
  first.table = second.table = log.table;
  first.speech = second.speech = log.speech;
  first.survey = second.survey = log.survey;
  first.frames.assign(log.frames.begin(), log.frames.begin() + 80);
  second.frames.assign(log.frames.begin() + 80, log.frames.end());
  auto whole = ind::assemble_vector(m, log, "p1");
  auto a = ind::assemble_vector(m, first, "p1");
  auto b = ind::assemble_vector(m, second, "p1");
  for (int i : {ind::feat::looks_other, ind::feat::other_looks, ind::feat::looks_mediator,
                ind::feat::mediator_looks}) {
    CHECK_THAT((a[i] + b[i]) / 2.0, WithinAbs(whole[i], 1e-9));
  }
}

TEST_CASE("session log json-lines round trip") {
  auto m = individual_manifest();
  auto log = scripted_log(m, 5, 60);
  auto dir = std::filesystem::temp_directory_path() / "vom_test_log";
  std::filesystem::create_directories(dir);
  ind::save_session_log(log, dir / "frames.jsonl");
  auto frames = ind::load_frame_log(dir / "frames.jsonl");
  REQUIRE(frames.size() == log.frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f)
    for (const auto& [id, pf] : log.frames[f]) {
      const auto& back = frames[f].at(id);
      CHECK(back.pose_deg == pf.pose_deg);
      CHECK(back.flow == pf.flow);
      CHECK(back.pitch_deg == pf.pitch_deg);
      if (pf.hands) {
        REQUIRE(back.hands.has_value());
        CHECK(back.hands->first.x == pf.hands->first.x);
        CHECK(back.hands->second.z == pf.hands->second.z);
      }
    }
}
