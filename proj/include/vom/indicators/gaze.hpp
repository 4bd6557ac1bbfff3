#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/core/manifest.hpp"

namespace vom::ind {

// Target-gaze codes. Mediator-to-mediator gazes are discarded and never
// codified.
enum class GazeCode {
  none,
  at_party,     // a mediator looks at a party (victim or offender side)
  at_mediator,  // a party member looks at a mediator
  same_party,   // a party member looks at someone in the own party
  other_party,  // a party member looks at the other party
};

struct GazeFrame {
  GazeCode code = GazeCode::none;
  std::string target_id;     // participant looked at, empty for none
  std::string target_party;  // party of the target, empty for mediators
};

// One entry per participant per frame; participants without a valid pose
// estimate carry code none for that frame.
using GazeTimeline = std::vector<std::map<std::string, GazeFrame>>;

inline GazeFrame codify_one(const core::SessionManifest& manifest, const std::string& gazer,
                            double angle_deg) {
  GazeFrame out;
  const core::Participant* who = manifest.find(gazer);
  if (!who) throw std::invalid_argument("codify_gaze: unknown participant '" + gazer + "'");
  for (const auto& r : manifest.ranges_for(gazer)) {
    if (angle_deg < r.angle_lo || angle_deg >= r.angle_hi) continue;
    const core::Participant* target = manifest.find(r.target);
    if (!target) continue;
    bool gazer_mediator = who->role == core::Role::mediator;
    bool target_mediator = target->role == core::Role::mediator;
    if (gazer_mediator && target_mediator) return out;  // discarded
    out.target_id = target->id;
    out.target_party = manifest.party_of(target->id);
    if (gazer_mediator) {
      out.code = GazeCode::at_party;
    } else if (target_mediator) {
      out.code = GazeCode::at_mediator;
    } else {
      std::string own = manifest.party_of(gazer);
      out.code = out.target_party == own ? GazeCode::same_party : GazeCode::other_party;
    }
    return out;
  }
  return out;
}

// pose_by_frame[f][id] = head yaw for that frame, absent when the pose is
// not measurable.
inline GazeTimeline codify_gaze(
    const core::SessionManifest& manifest,
    const std::vector<std::map<std::string, double>>& pose_by_frame) {
  GazeTimeline out(pose_by_frame.size());
  for (std::size_t f = 0; f < pose_by_frame.size(); ++f)
    for (const auto& [id, angle] : pose_by_frame[f])
      out[f][id] = codify_one(manifest, id, angle);
  return out;
}

// Share of frames (percent) whose entry satisfies the predicate.
template <typename Pred>
double gaze_time_pct(const GazeTimeline& timeline, Pred&& pred) {
  if (timeline.empty()) return 0.0;
  int hits = 0;
  for (const auto& frame : timeline)
    if (pred(frame)) ++hits;
  return 100.0 * hits / static_cast<double>(timeline.size());
}

}  // namespace vom::ind
