#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "matbake/camera.hpp"

namespace matbake {

/// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std:: engines because
/// its output sequence is fixed by definition, so schedules are portable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double next_open_unit() noexcept {
    for (;;) {
      const double u = double(next() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  std::uint64_t state_;
};

/// Resolution and lens shared by every pose of a schedule.
struct RenderSettings {
  double radius = 2.8;
  double fov_y = 40.0;
  int width = 1024;
  int height = 1024;
};

inline constexpr std::size_t kManualViewCount = 5;
inline constexpr std::size_t kAzimuthSteps = 12;
inline constexpr double kRandomElevationLimit = 30.0;

struct ViewSchedule {
  std::vector<CameraPose> poses;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return poses.size(); }
};

/// Five fixed inspection views (top, then front/left/back/right at 15 degrees)
/// followed by, for each azimuth k*30, one pose at 0 elevation, one in
/// (0, +30) and one in (-30, 0).
ViewSchedule build_schedule(std::uint64_t seed, const RenderSettings& settings = {});

}  // namespace matbake
