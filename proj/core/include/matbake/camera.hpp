#pragma once

#include <optional>

#include <Eigen/Core>

#include "matbake/asset_io.hpp"

namespace matbake {

/// Orbit camera around the origin. The world is Z-up: elevation is measured
/// from the XY plane, azimuth counter-clockwise from +X.
struct CameraPose {
  double elevation = 0.0;  // degrees, [-90, 90]
  double azimuth = 0.0;    // degrees, [0, 360)
  double radius = 2.8;     // object units, > 1
  double fov_y = 40.0;     // degrees
  int width = 1024;
  int height = 1024;
  bool manual = false;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

/// Throws InvalidArgument when a field is outside its documented range.
void validate_pose(const CameraPose& pose);

struct CameraMatrices {
  Eigen::Matrix4d view;        // world -> camera (camera looks down -Z)
  Eigen::Matrix4d projection;  // camera -> clip; clip.w is the view depth
};

inline constexpr double kNearPlane = 0.01;
inline constexpr double kFarPlane = 100.0;

/// Above this |elevation| the look-at up vector switches from +Z to -Y.
inline constexpr double kPoleElevation = 89.0;

CameraMatrices pose_to_matrices(const CameraPose& pose);

/// Pixel-space projection: x right, y down, pixel (i, j) covers [i, i+1) x
/// [j, j+1); depth is the distance along the view axis.
struct ScreenPoint {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;
};

class Camera {
 public:
  explicit Camera(const CameraPose& pose);

  const CameraPose& pose() const noexcept { return pose_; }
  const CameraMatrices& matrices() const noexcept { return matrices_; }
  const Vec3& eye() const noexcept { return eye_; }

  /// Focal length in NDC units: 1 / tan(fov_y / 2).
  double focal() const noexcept { return focal_; }

  Eigen::Vector4d to_clip(const Vec3& world) const noexcept;
  ScreenPoint clip_to_screen(const Eigen::Vector4d& clip) const noexcept;

  /// Empty when the point lies behind the near plane.
  std::optional<ScreenPoint> project(const Vec3& world) const noexcept;

  /// World-space size of one pixel at the given view depth.
  double pixel_footprint(double depth) const noexcept;

 private:
  CameraPose pose_;
  CameraMatrices matrices_;
  Eigen::Matrix4d view_projection_;
  Vec3 eye_;
  double focal_;
};

}  // namespace matbake
