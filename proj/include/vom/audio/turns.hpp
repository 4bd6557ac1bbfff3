#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/audio/diarize.hpp"

namespace vom::audio {

// A speaker-labeled interval; may overlap across speakers when it comes
// from a scripted ground-truth timeline.
struct LabeledSegment {
  double t_start = 0, t_end = 0;
  std::string speaker;
};

struct Turn {
  double t_start = 0, t_end = 0;
  std::string speaker;
};

struct TurnStats {
  std::map<std::string, double> speaking_time_pct;  // share of total speech time
  std::map<std::string, double> turn_count_pct;     // share of all turns
  // interruption_pct[x][y]: % of y's turns whose successor turn by x starts
  // before y finishes (or within the grace period after).
  std::map<std::string, std::map<std::string, double>> interruption_pct;
  std::vector<Turn> turns;
  double total_speech_s = 0;
};

inline constexpr double kInterruptionGraceS = 0.15;

// Turns collapse consecutive same-speaker segments in start order.
inline std::vector<Turn> collapse_turns(std::vector<LabeledSegment> segs) {
  std::stable_sort(segs.begin(), segs.end(), [](const LabeledSegment& a, const LabeledSegment& b) {
    if (a.t_start != b.t_start) return a.t_start < b.t_start;
    return a.t_end < b.t_end;
  });
  std::vector<Turn> turns;
  for (const auto& s : segs) {
    if (!turns.empty() && turns.back().speaker == s.speaker)
      turns.back().t_end = std::max(turns.back().t_end, s.t_end);
    else
      turns.push_back({s.t_start, s.t_end, s.speaker});
  }
  return turns;
}

inline TurnStats turn_stats(const std::vector<LabeledSegment>& segments,
                            const std::vector<std::string>& participants,
                            double grace_s = kInterruptionGraceS) {
  if (segments.empty()) throw std::invalid_argument("turn_stats: empty timeline");
  TurnStats st;
  for (const auto& p : participants) {
    st.speaking_time_pct[p] = 0;
    st.turn_count_pct[p] = 0;
    for (const auto& q : participants) st.interruption_pct[p][q] = 0;
  }
  for (const auto& s : segments) {
    if (!st.speaking_time_pct.count(s.speaker))
      throw std::invalid_argument("turn_stats: segment speaker '" + s.speaker +
                                  "' not in participant list");
    st.speaking_time_pct[s.speaker] += s.t_end - s.t_start;
    st.total_speech_s += s.t_end - s.t_start;
  }
  for (auto& [p, v] : st.speaking_time_pct) v = 100.0 * v / st.total_speech_s;

  st.turns = collapse_turns(segments);
  std::map<std::string, int> turn_count, interrupted_count;
  std::map<std::string, std::map<std::string, int>> interruptions;
  for (const auto& t : st.turns) ++turn_count[t.speaker];
  for (std::size_t i = 0; i + 1 < st.turns.size(); ++i) {
    const Turn& cur = st.turns[i];
    const Turn& next = st.turns[i + 1];
    if (next.t_start <= cur.t_end + grace_s) ++interruptions[next.speaker][cur.speaker];
  }
  int total_turns = static_cast<int>(st.turns.size());
  for (const auto& p : participants) {
    st.turn_count_pct[p] = 100.0 * turn_count[p] / total_turns;
    for (const auto& q : participants) {
      if (p == q || turn_count[q] == 0) continue;
      st.interruption_pct[p][q] = 100.0 * interruptions[p][q] / turn_count[q];
    }
  }
  return st;
}

// Diarizer output plus the externally supplied cluster-to-participant map.
inline TurnStats turn_stats(const SpeakerTimeline& timeline,
                            const std::map<int, std::string>& mapping,
                            const std::vector<std::string>& participants,
                            double grace_s = kInterruptionGraceS) {
  std::vector<LabeledSegment> segs;
  for (const auto& s : timeline.segments) {
    auto it = mapping.find(s.cluster);
    if (it == mapping.end())
      throw std::invalid_argument("turn_stats: cluster " + std::to_string(s.cluster) +
                                  " has no participant mapping");
    segs.push_back({s.t_start, s.t_end, it->second});
  }
  return turn_stats(segs, participants, grace_s);
}

}  // namespace vom::audio
