#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "matbake/asset_io.hpp"
#include "matbake/camera.hpp"
#include "matbake/labels.hpp"
#include "matbake/raster.hpp"

namespace matbake {

inline constexpr int kMinUvResolution = 64;
inline constexpr int kMaxUvResolution = 8192;

/// Surface sample behind every texel of the UV layout. Texel (i, j) has its
/// center at u = (i + 0.5) / R, v = 1 - (j + 0.5) / R.
struct TexelSampleTable {
  int resolution = 0;
  std::vector<std::int32_t> face;             // GBuffer::kNone when no triangle covers the texel
  std::vector<std::array<double, 3>> bary;    // UV-space barycentrics of the texel center
  std::vector<Vec3> position;                 // interpolated object-space position
  std::vector<Vec3> normal;                   // unit geometric face normal
  std::size_t assigned_count = 0;
  std::size_t overlap_count = 0;              // texels claimed by more than one face

  std::size_t texel_count() const noexcept { return face.size(); }
  bool assigned(std::size_t texel) const noexcept { return face[texel] != GBuffer::kNone; }
};

/// Rasterizes every face in UV space at texel centers (top-left fill rule).
/// Overlapping charts keep the lowest face id and bump overlap_count.
TexelSampleTable rasterize_uv(const TriangleMesh& mesh, int resolution);

struct BakeOptions {
  /// Depth agreement tolerance as a fraction of the camera radius.
  double depth_bias_fraction = 1e-3;
  /// Texels whose normal . direction-to-camera falls below this are skipped.
  double min_facing = 0.1;
};

/// Gathers one view's labels into texture space. A texel receives the label
/// of the pixel its surface point projects into only when it faces the camera
/// (beyond min_facing), lands inside the frame and agrees with the G-buffer
/// depth at that pixel. The depth tolerance is the radius-relative bias plus
/// one pixel footprint times the surface slope, which absorbs the
/// quantization between pixel centers and analytic texel projections.
LabelUV bake_view(const TexelSampleTable& table, const GBuffer& gbuffer, const LabelMap& labels,
                  const CameraPose& pose, int view_index = 0, const BakeOptions& options = {});

}  // namespace matbake
