#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "vom/body/forest.hpp"
#include "vom/body/geometry.hpp"
#include "vom/body/plane.hpp"

namespace vom::ind {

enum class Posture { tilted_backward = 1, normal = 2, tilted_forward = 3 };

inline constexpr double kPostureTiltDeg = 10.0;

// Torso-axis pitch from the labeled 3D points: the principal axis oriented
// upward, pitch positive when the top leans toward the camera.
inline std::optional<double> torso_pitch(const body::BodyMask& mask, const ImageU16& depth,
                                         const core::CameraIntrinsics& cam,
                                         int min_pixels = 40) {
  std::vector<Eigen::Vector3d> pts;
  for (int y = 0; y < mask.labels.height(); ++y)
    for (int x = 0; x < mask.labels.width(); ++x) {
      if (mask.labels.at(x, y) != body::kTorso || depth.at(x, y) == 0) continue;
      auto p = body::project_3d(x, y, depth.at(x, y), cam);
      pts.emplace_back(p.x, p.y, p.z);
    }
  if (static_cast<int>(pts.size()) < min_pixels) return std::nullopt;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) {
    Eigen::Vector3d d = p - mean;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  Eigen::Vector3d axis = eig.eigenvectors().col(2);  // largest spread
  if (-axis.y() < 0) axis = -axis;                   // point it upward (-y is up)
  return std::atan2(-axis.z(), -axis.y()) * 180.0 / M_PI;
}

inline Posture classify_pitch(double pitch_deg) {
  if (pitch_deg > kPostureTiltDeg) return Posture::tilted_forward;
  if (pitch_deg < -kPostureTiltDeg) return Posture::tilted_backward;
  return Posture::normal;
}

// Majority vote over the per-frame classes; exact ties fall back to normal.
inline Posture posture_class(const std::vector<std::optional<double>>& pitch_by_frame) {
  int counts[4] = {0, 0, 0, 0};
  int visible = 0;
  for (const auto& p : pitch_by_frame)
    if (p) {
      ++visible;
      ++counts[static_cast<int>(classify_pitch(*p))];
    }
  if (pitch_by_frame.empty() || visible * 2 < static_cast<int>(pitch_by_frame.size()))
    throw std::invalid_argument("posture_class: torso visible in under half the frames");
  // strict majority over both other classes wins; any tie falls to normal
  if (counts[3] > counts[1] && counts[3] > counts[2]) return Posture::tilted_forward;
  if (counts[1] > counts[3] && counts[1] > counts[2]) return Posture::tilted_backward;
  return Posture::normal;
}

struct HandRelations {
  double together_pct = 0;                    // inter-hand distance under the gate
  std::optional<double> touch_face_mean_mm;   // mean qualifying hand-face distance
  std::optional<double> under_table_pct;      // both hands past the table plane
};

// Distances gate on the same center-offset threshold the tracker uses,
// read in millimeters.
inline HandRelations hand_relations(
    const std::vector<std::optional<std::pair<body::Point3D, body::Point3D>>>& hands,
    const std::vector<std::optional<body::Point3D>>& face_center,
    const std::optional<body::Plane>& table, double gate_mm) {
  if (hands.size() != face_center.size())
    throw std::invalid_argument("hand_relations: per-frame inputs must align");
  HandRelations out;
  int measurable = 0, together = 0, under = 0, under_measurable = 0, touch_n = 0;
  double touch_acc = 0;
  for (std::size_t f = 0; f < hands.size(); ++f) {
    if (!hands[f]) continue;
    ++measurable;
    const auto& [l, r] = *hands[f];
    if (body::distance_mm(l, r) < gate_mm) ++together;
    if (face_center[f]) {
      double d = std::min(body::distance_mm(l, *face_center[f]),
                          body::distance_mm(r, *face_center[f]));
      if (d < gate_mm) {
        touch_acc += d;
        ++touch_n;
      }
    }
    if (table) {
      ++under_measurable;
      // the plane is oriented with offset >= 0, so the camera sits on the
      // negative side; hands past the surface go positive
      if (table->signed_distance(l) > 0 && table->signed_distance(r) > 0) ++under;
    }
  }
  if (measurable == 0)
    throw std::invalid_argument("hand_relations: no frames with hand points");
  out.together_pct = 100.0 * together / static_cast<double>(measurable);
  if (touch_n > 0) out.touch_face_mean_mm = touch_acc / touch_n;
  if (table && under_measurable > 0)
    out.under_table_pct = 100.0 * under / static_cast<double>(under_measurable);
  return out;
}

}  // namespace vom::ind
