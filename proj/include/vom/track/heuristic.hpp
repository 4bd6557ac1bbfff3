#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "vom/core/manifest.hpp"

namespace vom::track {

enum class RegionKind { face, hand };

struct RegionCandidate {
  double cx = 0, cy = 0;     // mass center, pixels
  double area = 0;           // pixels^2
  double angle_deg = 0;      // head pose; unused for hands
  RegionKind kind = RegionKind::face;
};

enum class Outcome { hit, false_positive, false_negative };

struct TrackerDecision {
  Outcome outcome = Outcome::hit;
  RegionCandidate emitted;     // accepted candidate or propagated region
  bool annotation_request = false;
  double confidence = 1.0;
  double delta_center = 0, delta_angle = 0, delta_area = 0;
};

// Temporal-continuity filter over per-frame detections of one region of
// one person. Candidates are compared against the last accepted region;
// the three gates decide hit vs false positive, absence is a false
// negative, and rejected frames propagate the previous region so a region
// is emitted every frame.
class RegionTracker {
 public:
  void initialize(const RegionCandidate& manual) {
    last_ = manual;
    hits_ = 0;
    false_positives_ = 0;
    false_negatives_ = 0;
  }

  bool initialized() const { return last_.has_value(); }
  long hits() const { return hits_; }
  long false_positives() const { return false_positives_; }
  long false_negatives() const { return false_negatives_; }
  long errors() const { return false_positives_ + false_negatives_; }

  double confidence() const {
    long total = hits_ + errors();
    return total == 0 ? 1.0 : static_cast<double>(hits_) / static_cast<double>(total);
  }

  const RegionCandidate& last_accepted() const { return *last_; }

  TrackerDecision step(const std::optional<RegionCandidate>& candidate,
                       const core::ThresholdConfig& gates) {
    if (!last_) throw std::logic_error("RegionTracker::step before initialization");
    TrackerDecision d;
    if (!candidate) {
      ++false_negatives_;
      d.outcome = Outcome::false_negative;
      d.emitted = *last_;
    } else {
      d.delta_center = std::hypot(candidate->cx - last_->cx, candidate->cy - last_->cy);
      d.delta_angle = candidate->kind == RegionKind::face
                          ? std::abs(candidate->angle_deg - last_->angle_deg)
                          : 0.0;
      d.delta_area = last_->area > 0 ? std::abs(1.0 - candidate->area / last_->area) : 0.0;
      bool ok = d.delta_center <= gates.center_gate_px && d.delta_angle <= gates.angle_gate_deg &&
                d.delta_area <= gates.area_gate;
      if (ok) {
        ++hits_;
        d.outcome = Outcome::hit;
        last_ = *candidate;
        d.emitted = *candidate;
      } else {
        ++false_positives_;
        d.outcome = Outcome::false_positive;
        d.emitted = *last_;
      }
    }
    d.confidence = confidence();
    d.annotation_request = d.confidence < gates.confidence_gate;
    return d;
  }

 private:
  std::optional<RegionCandidate> last_;
  long hits_ = 0, false_positives_ = 0, false_negatives_ = 0;
};

}  // namespace vom::track
