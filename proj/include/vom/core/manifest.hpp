#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/util.hpp"

namespace vom::core {

struct ManifestParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingMediaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ManifestInvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Role { mediator, victim, offender, companion };

inline std::string role_name(Role r) {
  switch (r) {
    case Role::mediator: return "mediator";
    case Role::victim: return "victim";
    case Role::offender: return "offender";
    case Role::companion: return "companion";
  }
  return "?";
}

inline Role role_from(const std::string& s) {
  if (s == "mediator") return Role::mediator;
  if (s == "victim") return Role::victim;
  if (s == "offender") return Role::offender;
  if (s == "companion") return Role::companion;
  throw ManifestParseError("unknown role '" + s + "'");
}

struct Participant {
  std::string id;
  Role role = Role::mediator;
  int gender = 1;    // {1,2}
  int age_band = 1;  // [1,3]
  // Companions sit with a party; empty for everyone else.
  std::string party_of;

  bool operator==(const Participant&) const = default;
};

struct CameraIntrinsics {
  double principal_x = 0, principal_y = 0;  // pixels
  double focal_x = 1, focal_y = 1;          // pixel scale

  bool operator==(const CameraIntrinsics&) const = default;
};

// Gates of the temporal-continuity heuristic plus the skin likelihood gate.
struct ThresholdConfig {
  double center_gate_px = 85.0;    // mass-center offset gate
  double angle_gate_deg = 45.0;    // head-pose offset gate
  double area_gate = 0.2;          // |1 - area ratio| gate
  double confidence_gate = 0.5;    // tracker confidence floor, in (0,1)
  double skin_gate = 0.6;          // skin likelihood gate, in (0,1)

  bool operator==(const ThresholdConfig&) const = default;
};

struct GazeRange {
  std::string participant;  // whose head pose is tested
  double angle_lo = 0, angle_hi = 0;
  std::string target;  // participant seen within that range

  bool operator==(const GazeRange&) const = default;
};

enum class EncounterKind { individual, joint };

struct SessionManifest {
  std::string session_id;
  std::string case_id;
  EncounterKind encounter = EncounterKind::individual;
  std::vector<Participant> participants;
  CameraIntrinsics camera;
  std::string audio_path;  // stored as written, relative to base_dir
  std::string rgb_dir;
  std::string depth_dir;
  int frame_count = 0;
  double fps = 12.0;
  ThresholdConfig thresholds;
  std::vector<GazeRange> gaze_ranges;
  // Demographics of the case's absent party; set for individual encounters
  // so the other-party descriptors stay defined.
  std::optional<Participant> counterpart;

  std::filesystem::path base_dir;  // directory the manifest was loaded from

  bool operator==(const SessionManifest& o) const {
    return session_id == o.session_id && case_id == o.case_id &&
           encounter == o.encounter && participants == o.participants &&
           camera == o.camera && audio_path == o.audio_path &&
           rgb_dir == o.rgb_dir && depth_dir == o.depth_dir &&
           frame_count == o.frame_count && fps == o.fps &&
           thresholds == o.thresholds && gaze_ranges == o.gaze_ranges &&
           counterpart == o.counterpart;
  }

  std::filesystem::path audio_file() const { return base_dir / audio_path; }
  std::filesystem::path rgb_path() const { return base_dir / rgb_dir; }
  std::filesystem::path depth_path() const { return base_dir / depth_dir; }

  const Participant* find(const std::string& id) const {
    for (const auto& p : participants)
      if (p.id == id) return &p;
    return nullptr;
  }

  std::vector<const Participant*> parties() const {
    std::vector<const Participant*> out;
    for (const auto& p : participants)
      if (p.role == Role::victim || p.role == Role::offender) out.push_back(&p);
    return out;
  }

  std::vector<const Participant*> mediators() const {
    std::vector<const Participant*> out;
    for (const auto& p : participants)
      if (p.role == Role::mediator) out.push_back(&p);
    return out;
  }

  // Party a participant belongs to: the party id itself, or the party a
  // companion sits with. Mediators map to empty.
  std::string party_of(const std::string& id) const {
    const Participant* p = find(id);
    if (!p) return {};
    if (p->role == Role::victim || p->role == Role::offender) return p->id;
    if (p->role == Role::companion) return p->party_of;
    return {};
  }

  std::vector<GazeRange> ranges_for(const std::string& id) const {
    std::vector<GazeRange> out;
    for (const auto& g : gaze_ranges)
      if (g.participant == id) out.push_back(g);
    return out;
  }
};

enum class ThresholdPolicy { warn, strict };

namespace detail {
inline void check_threshold(std::vector<std::string>& warnings, ThresholdPolicy policy,
                            const std::string& name, double v, double lo, double hi) {
  if (v >= lo && v <= hi) return;
  std::string msg = name + "=" + format_double(v) + " outside default range [" +
                    format_double(lo) + "," + format_double(hi) + "]";
  if (policy == ThresholdPolicy::strict) throw ManifestInvariantError(msg);
  warnings.push_back(msg);
}
}  // namespace detail

// Structural invariants. Returns threshold-range warnings in warn mode.
inline std::vector<std::string> validate_manifest(const SessionManifest& m,
                                                  ThresholdPolicy policy = ThresholdPolicy::warn) {
  if (m.session_id.empty()) throw ManifestInvariantError("empty session_id");
  if (m.participants.empty()) throw ManifestInvariantError("no participants");
  std::map<std::string, int> ids;
  for (const auto& p : m.participants) {
    if (++ids[p.id] > 1) throw ManifestInvariantError("duplicate participant id '" + p.id + "'");
    if (p.gender != 1 && p.gender != 2)
      throw ManifestInvariantError("participant '" + p.id + "' gender outside {1,2}");
    if (p.age_band < 1 || p.age_band > 3)
      throw ManifestInvariantError("participant '" + p.id + "' age_band outside [1,3]");
    if (p.role == Role::companion) {
      const Participant* host = m.find(p.party_of);
      if (!host || (host->role != Role::victim && host->role != Role::offender))
        throw ManifestInvariantError("companion '" + p.id + "' has no valid party");
    }
  }
  std::size_t n_parties = m.parties().size();
  if (m.encounter == EncounterKind::individual && n_parties != 1)
    throw ManifestInvariantError("individual encounter must have exactly 1 party, found " +
                                 std::to_string(n_parties));
  if (m.encounter == EncounterKind::joint && n_parties < 2)
    throw ManifestInvariantError("joint encounter needs >=2 parties, found " +
                                 std::to_string(n_parties));
  if (m.mediators().empty()) throw ManifestInvariantError("session has no mediator");
  if (m.camera.focal_x <= 0 || m.camera.focal_y <= 0)
    throw ManifestInvariantError("camera focal scale must be positive");
  if (m.frame_count < 0) throw ManifestInvariantError("negative frame count");
  if (m.fps <= 0) throw ManifestInvariantError("fps must be positive");

  // Gaze ranges: known endpoints, non-overlap per participant.
  for (const auto& g : m.gaze_ranges) {
    if (!m.find(g.participant))
      throw ManifestInvariantError("gaze range for unknown participant '" + g.participant + "'");
    if (!m.find(g.target))
      throw ManifestInvariantError("gaze range targets unknown participant '" + g.target + "'");
    if (g.angle_lo >= g.angle_hi)
      throw ManifestInvariantError("gaze range for '" + g.participant + "' has angle_lo >= angle_hi");
  }
  for (const auto& a : m.gaze_ranges)
    for (const auto& b : m.gaze_ranges) {
      if (&a == &b || a.participant != b.participant) continue;
      if (a.angle_lo < b.angle_hi && b.angle_lo < a.angle_hi)
        throw ManifestInvariantError("overlapping gaze ranges for '" + a.participant + "'");
    }

  std::vector<std::string> warnings;
  const auto& t = m.thresholds;
  detail::check_threshold(warnings, policy, "center_gate_px", t.center_gate_px, 50, 120);
  detail::check_threshold(warnings, policy, "angle_gate_deg", t.angle_gate_deg, 30, 60);
  detail::check_threshold(warnings, policy, "area_gate", t.area_gate, 0.1, 0.3);
  if (t.confidence_gate <= 0 || t.confidence_gate >= 1)
    throw ManifestInvariantError("confidence_gate must be in (0,1)");
  if (t.skin_gate <= 0 || t.skin_gate >= 1)
    throw ManifestInvariantError("skin_gate must be in (0,1)");
  return warnings;
}

inline void save_manifest(const SessionManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << "session_id " << m.session_id << "\n";
  out << "case_id " << m.case_id << "\n";
  out << "encounter " << (m.encounter == EncounterKind::joint ? "joint" : "individual") << "\n";
  out << "audio " << m.audio_path << "\n";
  out << "rgb_dir " << m.rgb_dir << "\n";
  out << "depth_dir " << m.depth_dir << "\n";
  out << "frames " << m.frame_count << "\n";
  out << "fps " << format_double(m.fps) << "\n";
  out << "camera " << format_double(m.camera.principal_x) << " "
      << format_double(m.camera.principal_y) << " " << format_double(m.camera.focal_x) << " "
      << format_double(m.camera.focal_y) << "\n";
  const auto& t = m.thresholds;
  out << "thresholds " << format_double(t.center_gate_px) << " " << format_double(t.angle_gate_deg)
      << " " << format_double(t.area_gate) << " " << format_double(t.confidence_gate) << " "
      << format_double(t.skin_gate) << "\n";
  for (const auto& p : m.participants) {
    out << "participant " << p.id << " " << role_name(p.role) << " " << p.gender << " "
        << p.age_band;
    if (p.role == Role::companion) out << " party " << p.party_of;
    out << "\n";
  }
  if (m.counterpart)
    out << "counterpart " << m.counterpart->gender << " " << m.counterpart->age_band << "\n";
  for (const auto& g : m.gaze_ranges)
    out << "gaze_range " << g.participant << " " << format_double(g.angle_lo) << " "
        << format_double(g.angle_hi) << " " << g.target << "\n";
}

// Parses, validates, and checks that referenced media exist.
// check_media=false skips the existence test (synth writes the manifest
// before the media).
inline SessionManifest load_manifest(const std::filesystem::path& path,
                                     ThresholdPolicy policy = ThresholdPolicy::warn,
                                     bool check_media = true,
                                     std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw ManifestParseError("cannot open manifest: " + path.string());
  SessionManifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int lineno = 0;
  auto need = [&](const std::vector<std::string>& tok, std::size_t n) {
    if (tok.size() < n)
      throw ManifestParseError(path.string() + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(n - 1) + " value(s) after '" +
                               tok[0] + "'");
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    try {
      if (key == "session_id") need(tok, 2), m.session_id = tok[1];
      else if (key == "case_id") need(tok, 2), m.case_id = tok[1];
      else if (key == "encounter") {
        need(tok, 2);
        if (tok[1] == "individual") m.encounter = EncounterKind::individual;
        else if (tok[1] == "joint") m.encounter = EncounterKind::joint;
        else throw ManifestParseError("unknown encounter kind '" + tok[1] + "'");
      } else if (key == "audio") need(tok, 2), m.audio_path = tok[1];
      else if (key == "rgb_dir") need(tok, 2), m.rgb_dir = tok[1];
      else if (key == "depth_dir") need(tok, 2), m.depth_dir = tok[1];
      else if (key == "frames") need(tok, 2), m.frame_count = static_cast<int>(parse_long(tok[1]));
      else if (key == "fps") need(tok, 2), m.fps = parse_double(tok[1]);
      else if (key == "camera") {
        need(tok, 5);
        m.camera = {parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]),
                    parse_double(tok[4])};
      } else if (key == "thresholds") {
        need(tok, 6);
        m.thresholds = {parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]),
                        parse_double(tok[4]), parse_double(tok[5])};
      } else if (key == "participant") {
        need(tok, 5);
        Participant p;
        p.id = tok[1];
        p.role = role_from(tok[2]);
        p.gender = static_cast<int>(parse_long(tok[3]));
        p.age_band = static_cast<int>(parse_long(tok[4]));
        if (tok.size() >= 7 && tok[5] == "party") p.party_of = tok[6];
        m.participants.push_back(std::move(p));
      } else if (key == "counterpart") {
        need(tok, 3);
        Participant p;
        p.id = "counterpart";
        p.gender = static_cast<int>(parse_long(tok[1]));
        p.age_band = static_cast<int>(parse_long(tok[2]));
        m.counterpart = p;
      } else if (key == "gaze_range") {
        need(tok, 5);
        m.gaze_ranges.push_back(
            {tok[1], parse_double(tok[2]), parse_double(tok[3]), tok[4]});
      } else {
        throw ManifestParseError("unknown key '" + key + "'");
      }
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const ManifestParseError*>(&e)) throw;
      throw ManifestParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  auto warn = validate_manifest(m, policy);
  if (warnings) *warnings = std::move(warn);
  if (check_media) {
    namespace fs = std::filesystem;
    if (!fs::exists(m.audio_file()))
      throw MissingMediaError("audio file missing: " + m.audio_file().string());
    if (!fs::is_directory(m.rgb_path()))
      throw MissingMediaError("rgb directory missing: " + m.rgb_path().string());
    if (!fs::is_directory(m.depth_path()))
      throw MissingMediaError("depth directory missing: " + m.depth_path().string());
  }
  return m;
}

}  // namespace vom::core
