#include "matbake/render.hpp"

#include <algorithm>
#include <cmath>

namespace matbake {

Vec2 interpolate_uv(const TriangleMesh& mesh, std::size_t face, const std::array<double, 3>& bary) {
  return bary[0] * mesh.uv(face, 0) + bary[1] * mesh.uv(face, 1) + bary[2] * mesh.uv(face, 2);
}

Vec3 interpolate_position(const TriangleMesh& mesh, std::size_t face, const std::array<double, 3>& bary) {
  return bary[0] * mesh.position(face, 0) + bary[1] * mesh.position(face, 1) + bary[2] * mesh.position(face, 2);
}

RenderedView render_view(const Asset& asset, const CameraPose& pose) {
  const Camera camera(pose);
  RenderedView view;
  view.gbuffer = rasterize_gbuffer(asset.mesh, camera);
  view.color = TextureImage(pose.width, pose.height);
  const auto& gb = view.gbuffer;
  for (int y = 0; y < gb.height; ++y) {
    for (int x = 0; x < gb.width; ++x) {
      const std::size_t idx = gb.index(x, y);
      const std::int32_t face = gb.face[idx];
      if (face == GBuffer::kNone) continue;
      const Vec2 uv = interpolate_uv(asset.mesh, std::size_t(face), gb.bary[idx]);
      const auto rgba = sample_bilinear(asset.albedo, uv.x(), uv.y());
      auto to_byte = [](double c) { return static_cast<std::uint8_t>(std::clamp(std::lround(c), 0L, 255L)); };
      view.color.set(x, y, to_byte(rgba[0]), to_byte(rgba[1]), to_byte(rgba[2]), 255);
    }
  }
  return view;
}

std::vector<std::uint16_t> depth_to_gray16(const GBuffer& gbuffer, double radius) {
  std::vector<std::uint16_t> out(gbuffer.depth.size(), 0);
  const double near = radius - 1.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (gbuffer.face[i] == GBuffer::kNone) continue;
    const double t = std::clamp((gbuffer.depth[i] - near) / 2.0, 0.0, 1.0);
    out[i] = static_cast<std::uint16_t>(1 + std::lround((1.0 - t) * 65534.0));
  }
  return out;
}

}  // namespace matbake
