#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vom/audio/turns.hpp"
#include "vom/body/plane.hpp"
#include "vom/indicators/agitation.hpp"
#include "vom/indicators/gaze.hpp"
#include "vom/indicators/posture.hpp"
#include "vom/indicators/vector.hpp"

namespace vom::ind {

// Per-frame measurements for one participant, however they were obtained
// (vision pipeline or scripted truth).
struct PersonFrame {
  std::optional<double> pose_deg;
  std::optional<std::pair<body::Point3D, body::Point3D>> hands;  // left, right
  std::optional<body::Point3D> face;
  std::optional<double> flow;       // upper-body mean flow, px/frame
  std::optional<double> pitch_deg;  // torso pitch
};

struct SessionLog {
  std::vector<std::map<std::string, PersonFrame>> frames;
  std::optional<body::Plane> table;
  std::vector<audio::LabeledSegment> speech;  // participant-labeled
  std::map<std::string, std::pair<int, int>> survey;  // party -> nervousness begin/end
};

struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// JSON-lines round trip for the per-frame log.

inline void save_session_log(const SessionLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    nlohmann::ordered_json j;
    j["frame"] = f;
    auto& people = j["people"];
    people = nlohmann::ordered_json::object();
    for (const auto& [id, pf] : log.frames[f]) {
      nlohmann::ordered_json p = nlohmann::ordered_json::object();
      if (pf.pose_deg) p["pose"] = *pf.pose_deg;
      if (pf.hands)
        p["hands"] = {{pf.hands->first.x, pf.hands->first.y, pf.hands->first.z},
                      {pf.hands->second.x, pf.hands->second.y, pf.hands->second.z}};
      if (pf.face) p["face"] = {pf.face->x, pf.face->y, pf.face->z};
      if (pf.flow) p["flow"] = *pf.flow;
      if (pf.pitch_deg) p["pitch"] = *pf.pitch_deg;
      people[id] = std::move(p);
    }
    out << j.dump() << "\n";
  }
}

inline std::vector<std::map<std::string, PersonFrame>> load_frame_log(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::map<std::string, PersonFrame>> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    std::map<std::string, PersonFrame> frame;
    for (auto& [id, p] : j.at("people").items()) {
      PersonFrame pf;
      if (p.contains("pose")) pf.pose_deg = p["pose"].get<double>();
      if (p.contains("hands")) {
        auto& h = p["hands"];
        pf.hands = std::make_pair(
            body::Point3D{h[0][0].get<double>(), h[0][1].get<double>(), h[0][2].get<double>()},
            body::Point3D{h[1][0].get<double>(), h[1][1].get<double>(), h[1][2].get<double>()});
      }
      if (p.contains("face"))
        pf.face = body::Point3D{p["face"][0].get<double>(), p["face"][1].get<double>(),
                                p["face"][2].get<double>()};
      if (p.contains("flow")) pf.flow = p["flow"].get<double>();
      if (p.contains("pitch")) pf.pitch_deg = p["pitch"].get<double>();
      frame[id] = pf;
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

// ---------------------------------------------------------------------------

namespace detail {

inline const PersonFrame* person_at(const SessionLog& log, std::size_t f,
                                    const std::string& id) {
  auto it = log.frames[f].find(id);
  return it == log.frames[f].end() ? nullptr : &it->second;
}

inline std::vector<std::optional<HandPair>> hands_of(const SessionLog& log,
                                                     const std::string& id) {
  std::vector<std::optional<HandPair>> out(log.frames.size());
  for (std::size_t f = 0; f < log.frames.size(); ++f)
    if (const PersonFrame* p = person_at(log, f, id)) out[f] = p->hands;
  return out;
}

inline std::vector<std::optional<double>> flow_of(const SessionLog& log, const std::string& id) {
  std::vector<std::optional<double>> out(log.frames.size());
  for (std::size_t f = 0; f < log.frames.size(); ++f)
    if (const PersonFrame* p = person_at(log, f, id)) out[f] = p->flow;
  return out;
}

inline std::vector<bool> all_frames(std::size_t n) { return std::vector<bool>(n, true); }

// frames where `gazer`'s code passes the predicate
template <typename Pred>
std::vector<bool> gaze_subset(const GazeTimeline& gaze, const std::string& gazer, Pred&& pred) {
  std::vector<bool> out(gaze.size(), false);
  for (std::size_t f = 0; f < gaze.size(); ++f) {
    auto it = gaze[f].find(gazer);
    if (it != gaze[f].end() && pred(it->second)) out[f] = true;
  }
  return out;
}

inline double agitation_or_nan(const std::vector<std::optional<HandPair>>& hands,
                               const std::vector<bool>& subset) {
  try {
    return hand_agitation(hands, subset).value;
  } catch (const std::invalid_argument&) {
    return std::nan("");
  }
}

inline double body_agitation_or_nan(const std::vector<std::optional<double>>& flow,
                                    const std::vector<bool>& subset) {
  try {
    return body_agitation(flow, subset).value;
  } catch (const std::invalid_argument&) {
    return std::nan("");
  }
}

}  // namespace detail

// The 36 descriptors of one party-sample, assembled from the per-frame log,
// the speech timeline, manifest metadata, and the survey answers. Features
// whose inputs cannot exist in this session stay NaN for later imputation.
inline BehaviorVector assemble_vector(const core::SessionManifest& manifest,
                                      const SessionLog& log, const std::string& party_id) {
  const core::Participant* party = manifest.find(party_id);
  if (!party || (party->role != core::Role::victim && party->role != core::Role::offender))
    throw MissingInputError("assemble_vector: '" + party_id + "' is not a party");
  if (log.frames.empty()) throw MissingInputError("assemble_vector: empty frame log");
  auto mediators = manifest.mediators();
  if (mediators.empty()) throw MissingInputError("assemble_vector: no mediator");
  const core::Participant* mediator = mediators.front();

  // the other party's primary participant, if this session has one
  const core::Participant* other = nullptr;
  for (const auto* p : manifest.parties())
    if (p->id != party_id) other = p;

  BehaviorVector v;
  const std::size_t n = log.frames.size();

  // gaze codes from the logged pose angles
  std::vector<std::map<std::string, double>> poses(n);
  for (std::size_t f = 0; f < n; ++f)
    for (const auto& [id, pf] : log.frames[f])
      if (pf.pose_deg) poses[f][id] = *pf.pose_deg;
  GazeTimeline gaze = codify_gaze(manifest, poses);

  v[feat::role] = party->role == core::Role::victim ? 1 : 2;

  v[feat::looks_other] = gaze_time_pct(gaze, [&](const auto& frame) {
    auto it = frame.find(party_id);
    return it != frame.end() && it->second.code == GazeCode::other_party;
  });
  v[feat::other_looks] =
      other ? gaze_time_pct(gaze,
                            [&](const auto& frame) {
                              auto it = frame.find(other->id);
                              return it != frame.end() &&
                                     it->second.code == GazeCode::other_party &&
                                     it->second.target_party == party_id;
                            })
            : 0.0;
  v[feat::looks_mediator] = gaze_time_pct(gaze, [&](const auto& frame) {
    auto it = frame.find(party_id);
    return it != frame.end() && it->second.code == GazeCode::at_mediator;
  });
  v[feat::mediator_looks] = gaze_time_pct(gaze, [&](const auto& frame) {
    for (const auto* m : mediators) {
      auto it = frame.find(m->id);
      if (it != frame.end() && it->second.code == GazeCode::at_party &&
          it->second.target_party == party_id)
        return true;
    }
    return false;
  });

  // posture (f6)
  {
    std::vector<std::optional<double>> pitch(n);
    for (std::size_t f = 0; f < n; ++f)
      if (const PersonFrame* p = detail::person_at(log, f, party_id)) pitch[f] = p->pitch_deg;
    v[feat::posture] = static_cast<double>(static_cast<int>(posture_class(pitch)));
  }

  v[feat::gender_mediator] = mediator->gender;
  v[feat::gender_party] = party->gender;
  v[feat::age_mediator] = mediator->age_band;
  v[feat::age_party] = party->age_band;
  if (other) {
    v[feat::gender_other] = other->gender;
    v[feat::age_other] = other->age_band;
  } else if (manifest.counterpart) {
    v[feat::gender_other] = manifest.counterpart->gender;
    v[feat::age_other] = manifest.counterpart->age_band;
  }
  v[feat::session_type] = manifest.encounter == core::EncounterKind::joint ? 2 : 1;

  // agitation (f14..f21)
  auto party_hands = detail::hands_of(log, party_id);
  auto party_flow = detail::flow_of(log, party_id);
  auto at_other = detail::gaze_subset(gaze, party_id, [](const GazeFrame& g) {
    return g.code == GazeCode::other_party;
  });
  auto at_mediator_sub = detail::gaze_subset(gaze, party_id, [](const GazeFrame& g) {
    return g.code == GazeCode::at_mediator;
  });
  v[feat::body_agitation] = detail::body_agitation_or_nan(party_flow, detail::all_frames(n));
  v[feat::body_agitation_at_other] = detail::body_agitation_or_nan(party_flow, at_other);
  v[feat::body_agitation_at_mediator] =
      detail::body_agitation_or_nan(party_flow, at_mediator_sub);
  v[feat::hand_agitation] = detail::agitation_or_nan(party_hands, detail::all_frames(n));
  v[feat::hand_agitation_at_other] = detail::agitation_or_nan(party_hands, at_other);
  v[feat::hand_agitation_at_mediator] = detail::agitation_or_nan(party_hands, at_mediator_sub);

  {
    auto mediator_hands = detail::hands_of(log, mediator->id);
    auto mediator_at_party = detail::gaze_subset(gaze, mediator->id, [&](const GazeFrame& g) {
      return g.code == GazeCode::at_party && g.target_party == party_id;
    });
    v[feat::mediator_hand_agitation_at_party] =
        detail::agitation_or_nan(mediator_hands, mediator_at_party);
  }
  if (other) {
    auto other_hands = detail::hands_of(log, other->id);
    auto other_at_party = detail::gaze_subset(gaze, other->id, [&](const GazeFrame& g) {
      return g.code == GazeCode::other_party && g.target_party == party_id;
    });
    v[feat::other_hand_agitation_at_party] =
        detail::agitation_or_nan(other_hands, other_at_party);
  }

  // hand relations (f22..f24)
  {
    std::vector<std::optional<body::Point3D>> face(n);
    for (std::size_t f = 0; f < n; ++f)
      if (const PersonFrame* p = detail::person_at(log, f, party_id)) face[f] = p->face;
    auto rel = hand_relations(party_hands, face, log.table,
                              manifest.thresholds.center_gate_px);
    v[feat::hands_together] = rel.together_pct;
    if (rel.touch_face_mean_mm) v[feat::hands_touch_face] = *rel.touch_face_mean_mm;
    if (rel.under_table_pct) v[feat::hands_under_table] = *rel.under_table_pct;
  }

  // speech (f25..f34)
  {
    if (log.speech.empty()) throw MissingInputError("assemble_vector: empty speech timeline");
    std::vector<std::string> ids;
    for (const auto& p : manifest.participants) ids.push_back(p.id);
    auto stats = audio::turn_stats(log.speech, ids);
    v[feat::speak_time_mediator] = stats.speaking_time_pct[mediator->id];
    v[feat::speak_time_party] = stats.speaking_time_pct[party_id];
    v[feat::speak_time_other] = other ? stats.speaking_time_pct[other->id] : 0.0;
    v[feat::turns_mediator] = stats.turn_count_pct[mediator->id];
    v[feat::turns_party] = stats.turn_count_pct[party_id];
    v[feat::turns_other] = other ? stats.turn_count_pct[other->id] : 0.0;
    v[feat::mediator_interrupts_party] = stats.interruption_pct[mediator->id][party_id];
    v[feat::party_interrupts_mediator] = stats.interruption_pct[party_id][mediator->id];
    v[feat::party_interrupts_other] = other ? stats.interruption_pct[party_id][other->id] : 0.0;
    v[feat::other_interrupts_party] = other ? stats.interruption_pct[other->id][party_id] : 0.0;
  }

  // survey (f35, f36)
  auto survey = log.survey.find(party_id);
  if (survey != log.survey.end()) {
    v[feat::nervous_begin] = survey->second.first;
    v[feat::nervous_end] = survey->second.second;
  }
  return v;
}

}  // namespace vom::ind
