#include "matbake/camera.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "matbake/error.hpp"

namespace matbake {
namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void validate_pose(const CameraPose& pose) {
  if (!(pose.elevation >= -90.0 && pose.elevation <= 90.0)) {
    throw Error(ErrorCode::InvalidArgument, "elevation must be within [-90, 90]");
  }
  if (!(pose.azimuth >= 0.0 && pose.azimuth < 360.0)) {
    throw Error(ErrorCode::InvalidArgument, "azimuth must be within [0, 360)");
  }
  if (!(pose.radius > 1.0)) throw Error(ErrorCode::InvalidArgument, "camera radius must exceed 1");
  if (!(pose.fov_y > 0.0 && pose.fov_y < 180.0)) throw Error(ErrorCode::InvalidArgument, "fov_y must be within (0, 180)");
  if (pose.width <= 0 || pose.height <= 0) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
}

CameraMatrices pose_to_matrices(const CameraPose& pose) {
  const double el = deg2rad(pose.elevation);
  const double az = deg2rad(pose.azimuth);
  const Vec3 eye(pose.radius * std::cos(el) * std::cos(az), pose.radius * std::cos(el) * std::sin(az),
                 pose.radius * std::sin(el));
  const Vec3 forward = (-eye).normalized();
  const Vec3 world_up = std::abs(pose.elevation) > kPoleElevation ? Vec3(0, -1, 0) : Vec3(0, 0, 1);
  const Vec3 right = forward.cross(world_up).normalized();
  const Vec3 up = right.cross(forward);

  CameraMatrices m;
  m.view.setIdentity();
  m.view.block<1, 3>(0, 0) = right.transpose();
  m.view.block<1, 3>(1, 0) = up.transpose();
  m.view.block<1, 3>(2, 0) = -forward.transpose();
  m.view(0, 3) = -right.dot(eye);
  m.view(1, 3) = -up.dot(eye);
  m.view(2, 3) = forward.dot(eye);

  const double f = 1.0 / std::tan(deg2rad(pose.fov_y) * 0.5);
  const double aspect = double(pose.width) / double(pose.height);
  m.projection.setZero();
  m.projection(0, 0) = f / aspect;
  m.projection(1, 1) = f;
  m.projection(2, 2) = (kFarPlane + kNearPlane) / (kNearPlane - kFarPlane);
  m.projection(2, 3) = 2.0 * kFarPlane * kNearPlane / (kNearPlane - kFarPlane);
  m.projection(3, 2) = -1.0;
  return m;
}

Camera::Camera(const CameraPose& pose)
    : pose_(pose), matrices_(pose_to_matrices(pose)), focal_(1.0 / std::tan(deg2rad(pose.fov_y) * 0.5)) {
  view_projection_ = matrices_.projection * matrices_.view;
  const Eigen::Matrix3d rot = matrices_.view.block<3, 3>(0, 0);
  eye_ = -rot.transpose() * matrices_.view.block<3, 1>(0, 3);
}

Eigen::Vector4d Camera::to_clip(const Vec3& world) const noexcept {
  return view_projection_ * world.homogeneous();
}

ScreenPoint Camera::clip_to_screen(const Eigen::Vector4d& clip) const noexcept {
  const double inv_w = 1.0 / clip.w();
  return {(clip.x() * inv_w + 1.0) * 0.5 * pose_.width, (1.0 - clip.y() * inv_w) * 0.5 * pose_.height, clip.w()};
}

std::optional<ScreenPoint> Camera::project(const Vec3& world) const noexcept {
  const Eigen::Vector4d clip = to_clip(world);
  if (!(clip.w() >= kNearPlane)) return std::nullopt;
  return clip_to_screen(clip);
}

double Camera::pixel_footprint(double depth) const noexcept {
  return depth * 2.0 / (focal_ * pose_.height);
}

}  // namespace matbake
