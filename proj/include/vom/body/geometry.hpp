#pragma once

#include <stdexcept>
#include <utility>

#include "vom/core/manifest.hpp"

namespace vom::body {

struct Point3D {
  double x = 0, y = 0, z = 0;  // millimeters, camera frame
};

// Pixel + depth to metric camera coordinates.
inline Point3D project_3d(double px, double py, double depth_mm,
                          const core::CameraIntrinsics& cam) {
  if (depth_mm <= 0) throw std::invalid_argument("project_3d: invalid depth");
  Point3D p;
  p.x = (px - cam.principal_x) * depth_mm / cam.focal_x;
  p.y = (py - cam.principal_y) * depth_mm / cam.focal_y;
  p.z = depth_mm;
  return p;
}

inline std::pair<double, double> back_project(const Point3D& p,
                                              const core::CameraIntrinsics& cam) {
  if (p.z <= 0) throw std::invalid_argument("back_project: invalid depth");
  return {p.x * cam.focal_x / p.z + cam.principal_x,
          p.y * cam.focal_y / p.z + cam.principal_y};
}

inline double distance_mm(const Point3D& a, const Point3D& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace vom::body
