#pragma once

#include <cstdint>
#include <vector>

#include "matbake/asset_io.hpp"
#include "matbake/camera.hpp"
#include "matbake/image.hpp"
#include "matbake/raster.hpp"

namespace matbake {

struct RenderedView {
  TextureImage color;  // unlit albedo, alpha 0 on background
  GBuffer gbuffer;
};

/// Renders the unlit albedo of a normalized asset. Visibility comes from
/// rasterize_gbuffer; each covered pixel samples the albedo bilinearly at the
/// perspective-correct UV and is written fully opaque.
RenderedView render_view(const Asset& asset, const CameraPose& pose);

Vec2 interpolate_uv(const TriangleMesh& mesh, std::size_t face, const std::array<double, 3>& bary);
Vec3 interpolate_position(const TriangleMesh& mesh, std::size_t face, const std::array<double, 3>& bary);

/// 16-bit depth visualization for debug dumps: 0 = background, otherwise
/// depth mapped linearly from [radius - 1, radius + 1] onto [65535, 1].
std::vector<std::uint16_t> depth_to_gray16(const GBuffer& gbuffer, double radius);

}  // namespace matbake
