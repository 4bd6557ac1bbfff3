#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vom/body/geometry.hpp"

namespace vom::ind {

struct HandAgitation {
  double value = 0;         // mm per frame step, both hands accumulated
  int pairs = 0;            // displacement terms averaged
  int excluded_frames = 0;  // subset frames without valid hand points
};

using HandPair = std::pair<body::Point3D, body::Point3D>;

// Mean over consecutive valid frames of the summed left+right displacement.
// The subset selects which frames participate (gaze-conditioned variants);
// frames without hand points are excluded and counted.
inline HandAgitation hand_agitation(const std::vector<std::optional<HandPair>>& hands,
                                    const std::vector<bool>& subset) {
  if (hands.size() != subset.size())
    throw std::invalid_argument("hand_agitation: subset mask must cover every frame");
  HandAgitation out;
  std::vector<const HandPair*> seq;
  for (std::size_t f = 0; f < hands.size(); ++f) {
    if (!subset[f]) continue;
    if (!hands[f]) {
      ++out.excluded_frames;
      continue;
    }
    seq.push_back(&*hands[f]);
  }
  if (seq.size() < 2)
    throw std::invalid_argument("hand_agitation: need at least 2 frames with hand points");
  double acc = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    acc += body::distance_mm(seq[i]->first, seq[i - 1]->first) +
           body::distance_mm(seq[i]->second, seq[i - 1]->second);
    ++out.pairs;
  }
  out.value = acc / static_cast<double>(out.pairs);
  return out;
}

struct BodyAgitation {
  double value = 0;
  int frames = 0;
};

// Mean upper-body flow over the subset frames that have a measurement.
inline BodyAgitation body_agitation(const std::vector<std::optional<double>>& flow,
                                    const std::vector<bool>& subset) {
  if (flow.size() != subset.size())
    throw std::invalid_argument("body_agitation: subset mask must cover every frame");
  BodyAgitation out;
  double acc = 0;
  for (std::size_t f = 0; f < flow.size(); ++f) {
    if (!subset[f] || !flow[f]) continue;
    acc += *flow[f];
    ++out.frames;
  }
  if (out.frames == 0)
    throw std::invalid_argument("body_agitation: empty subset, nothing to average");
  out.value = acc / static_cast<double>(out.frames);
  return out;
}

}  // namespace vom::ind
