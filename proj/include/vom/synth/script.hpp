#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/core/manifest.hpp"

namespace vom::synth {

// Who speaks when; overlapping spans encode scripted interruptions.
struct SpeechSpan {
  std::string speaker;
  double t0 = 0, t1 = 0;
};

// Step schedule: the value at frame f is the entry with the largest
// start_frame <= f.
template <typename V>
struct StepKey {
  int frame = 0;
  V value{};
};

struct HandPose {
  double lx = 0, ly = 0, lz = 0;  // left hand, mm
  double rx = 0, ry = 0, rz = 0;  // right hand, mm
  bool visible = true;
};

// Voice rendered as a harmonic stack plus tilted noise; the envelope
// is what separates speakers spectrally.
struct VoiceProfile {
  double f0 = 140;
  double harmonic_decay = 1.0;  // gain of harmonic k is k^-decay
  int harmonics = 20;
  double noise_gain = 0.05;
  double noise_tilt = 0.0;  // >0 brightens, <0 darkens
  double level = 0.35;
};

struct PersonScript {
  core::Participant who;
  int seat = 0;
  VoiceProfile voice;
  // target participant id per frame span; empty id = looking away
  std::vector<StepKey<std::string>> gaze_plan;
  std::vector<StepKey<HandPose>> hand_keys;  // linear interpolation between keys
  std::vector<StepKey<double>> pitch_keys;   // torso pitch, degrees, step
  double sway_amp_px = 0;                    // horizontal body oscillation
  int sway_period_frames = 32;
  int nervous_begin = 1, nervous_end = 1;    // survey answers [1,5]
};

struct TableSpec {
  bool present = false;
  double y_at_ref = 320;   // table surface y (camera coords, +down) at z_ref, mm
  double z_ref = 1500;
  double slope = -0.08;    // dy per mm of z; surface recedes upward
  double z_near = 900, z_far = 2100;
};

struct SessionScript {
  std::string session_id;
  std::string case_id;
  core::EncounterKind encounter = core::EncounterKind::individual;
  int width = 320, height = 240;
  int frame_count = 180;
  double fps = 12.0;
  double audio_s = 60.0;
  core::CameraIntrinsics camera{160, 120, 290, 290};
  core::ThresholdConfig thresholds;
  std::optional<core::Participant> counterpart;
  std::vector<PersonScript> people;
  std::vector<SpeechSpan> speech;
  TableSpec table;

  const PersonScript* find(const std::string& id) const {
    for (const auto& p : people)
      if (p.who.id == id) return &p;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Scripted value lookups.

template <typename V>
inline const V& step_value(const std::vector<StepKey<V>>& keys, int frame, const V& fallback) {
  const V* best = &fallback;
  for (const auto& k : keys)
    if (k.frame <= frame) best = &k.value;
  return *best;
}

inline HandPose hand_pose_at(const std::vector<StepKey<HandPose>>& keys, int frame) {
  if (keys.empty()) return HandPose{.visible = false};
  if (frame <= keys.front().frame) return keys.front().value;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (frame > keys[i + 1].frame) continue;
    const auto& a = keys[i];
    const auto& b = keys[i + 1];
    double t = static_cast<double>(frame - a.frame) / (b.frame - a.frame);
    if (!a.value.visible || !b.value.visible) return t < 1.0 ? a.value : b.value;
    HandPose h;
    h.lx = a.value.lx + t * (b.value.lx - a.value.lx);
    h.ly = a.value.ly + t * (b.value.ly - a.value.ly);
    h.lz = a.value.lz + t * (b.value.lz - a.value.lz);
    h.rx = a.value.rx + t * (b.value.rx - a.value.rx);
    h.ry = a.value.ry + t * (b.value.ry - a.value.ry);
    h.rz = a.value.rz + t * (b.value.rz - a.value.rz);
    return h;
  }
  return keys.back().value;
}

// ---------------------------------------------------------------------------
// Seating geometry shared by the renderer and the manifest gaze ranges.

inline double seat_x_mm(int seat) {
  static const double xs[] = {-520.0, 520.0, -1150.0, 1150.0};
  return xs[seat & 3];
}

inline double seat_z_mm(int seat) { return seat < 2 ? 1700.0 : 1950.0; }

// Head yaw (degrees) for `from` looking at `to`; the off-target value is
// far outside every assigned range.
inline double gaze_angle(int from_seat, int to_seat) {
  double dx = seat_x_mm(to_seat) - seat_x_mm(from_seat);
  return std::atan2(dx, 1300.0) * 180.0 / M_PI;
}

inline constexpr double kGazeBandHalfDeg = 11.0;
inline constexpr double kGazeAwayDeg = 80.0;

inline std::vector<core::GazeRange> derive_gaze_ranges(const SessionScript& s) {
  std::vector<core::GazeRange> out;
  for (const auto& p : s.people)
    for (const auto& q : s.people) {
      if (p.who.id == q.who.id) continue;
      // mediator-to-mediator gaze is never codified
      if (p.who.role == core::Role::mediator && q.who.role == core::Role::mediator) continue;
      double c = gaze_angle(p.seat, q.seat);
      out.push_back({p.who.id, c - kGazeBandHalfDeg, c + kGazeBandHalfDeg, q.who.id});
    }
  return out;
}

inline core::SessionManifest derive_manifest(const SessionScript& s) {
  core::SessionManifest m;
  m.session_id = s.session_id;
  m.case_id = s.case_id;
  m.encounter = s.encounter;
  for (const auto& p : s.people) m.participants.push_back(p.who);
  m.camera = s.camera;
  m.audio_path = "audio.wav";
  m.rgb_dir = "rgb";
  m.depth_dir = "depth";
  m.frame_count = s.frame_count;
  m.fps = s.fps;
  m.thresholds = s.thresholds;
  m.gaze_ranges = derive_gaze_ranges(s);
  m.counterpart = s.counterpart;
  return m;
}

// ---------------------------------------------------------------------------
// On-disk form. One directive per line, whitespace separated.

inline void save_script(const SessionScript& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "session " << s.session_id << " " << s.case_id << " "
      << (s.encounter == core::EncounterKind::joint ? "joint" : "individual") << "\n";
  out << "video " << s.width << " " << s.height << " " << s.frame_count << " "
      << format_double(s.fps) << "\n";
  out << "audio_s " << format_double(s.audio_s) << "\n";
  out << "camera " << format_double(s.camera.principal_x) << " "
      << format_double(s.camera.principal_y) << " " << format_double(s.camera.focal_x) << " "
      << format_double(s.camera.focal_y) << "\n";
  const auto& t = s.thresholds;
  out << "thresholds " << format_double(t.center_gate_px) << " " << format_double(t.angle_gate_deg)
      << " " << format_double(t.area_gate) << " " << format_double(t.confidence_gate) << " "
      << format_double(t.skin_gate) << "\n";
  if (s.counterpart)
    out << "counterpart " << s.counterpart->gender << " " << s.counterpart->age_band << "\n";
  if (s.table.present)
    out << "table " << format_double(s.table.y_at_ref) << " " << format_double(s.table.z_ref)
        << " " << format_double(s.table.slope) << " " << format_double(s.table.z_near) << " "
        << format_double(s.table.z_far) << "\n";
  for (const auto& p : s.people) {
    out << "person " << p.who.id << " " << core::role_name(p.who.role) << " " << p.who.gender
        << " " << p.who.age_band << " seat " << p.seat;
    if (p.who.role == core::Role::companion) out << " party " << p.who.party_of;
    out << "\n";
    out << "voice " << p.who.id << " " << format_double(p.voice.f0) << " "
        << format_double(p.voice.harmonic_decay) << " " << p.voice.harmonics << " "
        << format_double(p.voice.noise_gain) << " " << format_double(p.voice.noise_tilt) << " "
        << format_double(p.voice.level) << "\n";
    out << "survey " << p.who.id << " " << p.nervous_begin << " " << p.nervous_end << "\n";
    if (p.sway_amp_px > 0)
      out << "sway " << p.who.id << " " << format_double(p.sway_amp_px) << " "
          << p.sway_period_frames << "\n";
    for (const auto& k : p.gaze_plan)
      out << "gaze " << p.who.id << " " << k.frame << " "
          << (k.value.empty() ? "-" : k.value) << "\n";
    for (const auto& k : p.hand_keys) {
      out << "hands " << p.who.id << " " << k.frame;
      if (!k.value.visible) out << " hidden";
      else
        out << " " << format_double(k.value.lx) << " " << format_double(k.value.ly) << " "
            << format_double(k.value.lz) << " " << format_double(k.value.rx) << " "
            << format_double(k.value.ry) << " " << format_double(k.value.rz);
      out << "\n";
    }
    for (const auto& k : p.pitch_keys)
      out << "pitch " << p.who.id << " " << k.frame << " " << format_double(k.value) << "\n";
  }
  for (const auto& sp : s.speech)
    out << "speech " << sp.speaker << " " << format_double(sp.t0) << " " << format_double(sp.t1)
        << "\n";
}

inline SessionScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  SessionScript s;
  std::string line;
  auto person = [&](const std::string& id) -> PersonScript& {
    for (auto& p : s.people)
      if (p.who.id == id) return p;
    throw std::runtime_error("script references unknown person '" + id + "'");
  };
  while (std::getline(in, line)) {
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& k = tok[0];
    if (k == "session") {
      s.session_id = tok.at(1);
      s.case_id = tok.at(2);
      s.encounter = tok.at(3) == "joint" ? core::EncounterKind::joint
                                         : core::EncounterKind::individual;
    } else if (k == "video") {
      s.width = static_cast<int>(parse_long(tok.at(1)));
      s.height = static_cast<int>(parse_long(tok.at(2)));
      s.frame_count = static_cast<int>(parse_long(tok.at(3)));
      s.fps = parse_double(tok.at(4));
    } else if (k == "audio_s") {
      s.audio_s = parse_double(tok.at(1));
    } else if (k == "camera") {
      s.camera = {parse_double(tok.at(1)), parse_double(tok.at(2)), parse_double(tok.at(3)),
                  parse_double(tok.at(4))};
    } else if (k == "thresholds") {
      s.thresholds = {parse_double(tok.at(1)), parse_double(tok.at(2)), parse_double(tok.at(3)),
                      parse_double(tok.at(4)), parse_double(tok.at(5))};
    } else if (k == "counterpart") {
      core::Participant cp;
      cp.id = "counterpart";
      cp.gender = static_cast<int>(parse_long(tok.at(1)));
      cp.age_band = static_cast<int>(parse_long(tok.at(2)));
      s.counterpart = cp;
    } else if (k == "table") {
      s.table.present = true;
      s.table.y_at_ref = parse_double(tok.at(1));
      s.table.z_ref = parse_double(tok.at(2));
      s.table.slope = parse_double(tok.at(3));
      s.table.z_near = parse_double(tok.at(4));
      s.table.z_far = parse_double(tok.at(5));
    } else if (k == "person") {
      PersonScript p;
      p.who.id = tok.at(1);
      p.who.role = core::role_from(tok.at(2));
      p.who.gender = static_cast<int>(parse_long(tok.at(3)));
      p.who.age_band = static_cast<int>(parse_long(tok.at(4)));
      p.seat = static_cast<int>(parse_long(tok.at(6)));
      if (tok.size() >= 9 && tok[7] == "party") p.who.party_of = tok[8];
      s.people.push_back(std::move(p));
    } else if (k == "voice") {
      auto& p = person(tok.at(1));
      p.voice.f0 = parse_double(tok.at(2));
      p.voice.harmonic_decay = parse_double(tok.at(3));
      p.voice.harmonics = static_cast<int>(parse_long(tok.at(4)));
      p.voice.noise_gain = parse_double(tok.at(5));
      p.voice.noise_tilt = parse_double(tok.at(6));
      p.voice.level = parse_double(tok.at(7));
    } else if (k == "survey") {
      auto& p = person(tok.at(1));
      p.nervous_begin = static_cast<int>(parse_long(tok.at(2)));
      p.nervous_end = static_cast<int>(parse_long(tok.at(3)));
    } else if (k == "sway") {
      auto& p = person(tok.at(1));
      p.sway_amp_px = parse_double(tok.at(2));
      p.sway_period_frames = static_cast<int>(parse_long(tok.at(3)));
    } else if (k == "gaze") {
      auto& p = person(tok.at(1));
      std::string target = tok.at(3) == "-" ? "" : tok.at(3);
      p.gaze_plan.push_back({static_cast<int>(parse_long(tok.at(2))), target});
    } else if (k == "hands") {
      auto& p = person(tok.at(1));
      StepKey<HandPose> key;
      key.frame = static_cast<int>(parse_long(tok.at(2)));
      if (tok.at(3) == "hidden") key.value.visible = false;
      else
        key.value = {parse_double(tok.at(3)), parse_double(tok.at(4)), parse_double(tok.at(5)),
                     parse_double(tok.at(6)), parse_double(tok.at(7)), parse_double(tok.at(8)),
                     true};
      p.hand_keys.push_back(key);
    } else if (k == "pitch") {
      auto& p = person(tok.at(1));
      p.pitch_keys.push_back({static_cast<int>(parse_long(tok.at(2))), parse_double(tok.at(3))});
    } else if (k == "speech") {
      s.speech.push_back({tok.at(1), parse_double(tok.at(2)), parse_double(tok.at(3))});
    } else {
      throw std::runtime_error("unknown script directive '" + k + "' in " + path.string());
    }
  }
  return s;
}

}  // namespace vom::synth
