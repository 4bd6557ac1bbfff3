#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "vom/body/flow.hpp"
#include "vom/body/geometry.hpp"
#include "vom/track/heuristic.hpp"
#include "vom/track/skin.hpp"

namespace vom::track {

struct RankedBlob {
  Blob blob;
  double mean_flow = 0;
  // sampled (pixel, flow magnitude) pairs inside the blob
  std::vector<std::pair<std::pair<int, int>, double>> flow_samples;
};

// Flow magnitude per blob between consecutive frames, sorted by movement
// (ties broken toward the larger blob).
inline std::vector<RankedBlob> rank_blobs_by_flow(const std::vector<Blob>& blobs,
                                                  const ImageF32& prev_gray,
                                                  const ImageF32& cur_gray,
                                                  const body::FlowConfig& cfg = {}) {
  std::vector<RankedBlob> ranked;
  for (const auto& blob : blobs) {
    RankedBlob rb;
    rb.blob = blob;
    std::vector<std::array<float, 2>> pts;
    for (std::size_t i = 0; i < blob.pixels.size();
         i += static_cast<std::size_t>(std::max(1, cfg.grid_step / 2))) {
      pts.push_back({static_cast<float>(blob.pixels[i].first),
                     static_cast<float>(blob.pixels[i].second)});
    }
    auto flow = body::lk_flow(prev_gray, cur_gray, pts, cfg);
    double acc = 0;
    int n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double mag = flow.valid[i] ? std::hypot(flow.flow[i][0], flow.flow[i][1]) : 0.0;
      rb.flow_samples.push_back({{static_cast<int>(pts[i][0]), static_cast<int>(pts[i][1])}, mag});
      if (flow.valid[i]) {
        acc += mag;
        ++n;
      }
    }
    rb.mean_flow = n > 0 ? acc / n : 0.0;
    ranked.push_back(std::move(rb));
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedBlob& a, const RankedBlob& b) {
    if (a.mean_flow != b.mean_flow) return a.mean_flow > b.mean_flow;
    return a.blob.area > b.blob.area;
  });
  return ranked;
}

// Up to two hand candidates, the blobs with the most movement.
inline std::vector<RegionCandidate> pick_hands(const std::vector<RankedBlob>& ranked) {
  std::vector<RegionCandidate> hands;
  for (std::size_t i = 0; i < ranked.size() && i < 2; ++i) {
    RegionCandidate c;
    c.cx = ranked[i].blob.cx;
    c.cy = ranked[i].blob.cy;
    c.area = ranked[i].blob.area;
    c.kind = RegionKind::hand;
    hands.push_back(c);
  }
  return hands;
}

struct HandPoint {
  body::Point3D point;
  std::pair<int, int> pixel{0, 0};
  bool depth_fallback = false;  // max-flow pixel had no depth reading
};

// The blob's strongest-flow pixel lifted to 3D; flow ties resolve toward
// the blob centroid, invalid depth falls back to the nearest valid blob
// pixel.
inline std::optional<HandPoint> hand_point_3d(const RankedBlob& rb, const ImageU16& depth,
                                              const core::CameraIntrinsics& cam) {
  if (rb.flow_samples.empty()) return std::nullopt;
  double best_mag = -1.0;
  double best_dist = 0;
  std::pair<int, int> best_px{0, 0};
  for (const auto& [px, mag] : rb.flow_samples) {
    double dist = std::hypot(px.first - rb.blob.cx, px.second - rb.blob.cy);
    if (mag > best_mag || (mag == best_mag && dist < best_dist)) {
      best_mag = mag;
      best_dist = dist;
      best_px = px;
    }
  }
  HandPoint hp;
  hp.pixel = best_px;
  double d = depth.at(best_px.first, best_px.second);
  if (d <= 0) {
    hp.depth_fallback = true;
    double nearest = std::numeric_limits<double>::infinity();
    std::pair<int, int> found{-1, -1};
    for (const auto& px : rb.blob.pixels) {
      if (depth.at(px.first, px.second) <= 0) continue;
      double dist = std::hypot(px.first - best_px.first, px.second - best_px.second);
      if (dist < nearest) {
        nearest = dist;
        found = px;
      }
    }
    if (found.first < 0) return std::nullopt;  // no valid depth anywhere in the blob
    hp.pixel = found;
    d = depth.at(found.first, found.second);
  }
  hp.point = body::project_3d(hp.pixel.first, hp.pixel.second, d, cam);
  return hp;
}

}  // namespace vom::track
