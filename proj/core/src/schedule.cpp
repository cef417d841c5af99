#include "matbake/schedule.hpp"

namespace matbake {

ViewSchedule build_schedule(std::uint64_t seed, const RenderSettings& settings) {
  ViewSchedule schedule;
  schedule.seed = seed;
  schedule.poses.reserve(kManualViewCount + kAzimuthSteps * 3);

  auto make = [&](double elevation, double azimuth, bool manual) {
    CameraPose pose;
    pose.elevation = elevation;
    pose.azimuth = azimuth;
    pose.radius = settings.radius;
    pose.fov_y = settings.fov_y;
    pose.width = settings.width;
    pose.height = settings.height;
    pose.manual = manual;
    return pose;
  };

  constexpr double manual[kManualViewCount][2] = {{90, 0}, {15, 0}, {15, 90}, {15, 180}, {15, 270}};
  for (const auto& m : manual) schedule.poses.push_back(make(m[0], m[1], true));

  SplitMix64 rng(seed);
  for (std::size_t k = 0; k < kAzimuthSteps; ++k) {
    const double azimuth = 360.0 / kAzimuthSteps * double(k);
    const double up = kRandomElevationLimit * rng.next_open_unit();
    const double down = -kRandomElevationLimit * rng.next_open_unit();
    schedule.poses.push_back(make(0.0, azimuth, false));
    schedule.poses.push_back(make(up, azimuth, false));
    schedule.poses.push_back(make(down, azimuth, false));
  }
  return schedule;
}

}  // namespace matbake
