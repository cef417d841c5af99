#include "matbake/uv_bake.hpp"

#include <cmath>

#include "matbake/error.hpp"

namespace matbake {

TexelSampleTable rasterize_uv(const TriangleMesh& mesh, int resolution) {
  if (resolution < kMinUvResolution || resolution > kMaxUvResolution) {
    throw Error(ErrorCode::InvalidArgument, "UV resolution must be within [64, 8192]");
  }
  validate_mesh(mesh);
  TexelSampleTable table;
  table.resolution = resolution;
  const std::size_t n = std::size_t(resolution) * resolution;
  table.face.assign(n, GBuffer::kNone);
  table.bary.assign(n, {0.0, 0.0, 0.0});
  table.position.assign(n, Vec3::Zero());
  table.normal.assign(n, Vec3::Zero());

  const double r = resolution;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    std::array<Vec2, 3> pts;
    for (int i = 0; i < 3; ++i) {
      const Vec2& uv = mesh.uv(f, i);
      pts[i] = Vec2(uv.x() * r, (1.0 - uv.y()) * r);
    }
    const Vec3 normal = mesh.face_normal(f);
    raster::scan_triangle(pts, resolution, resolution, [&](int x, int y, const std::array<double, 3>& l) {
      const std::size_t idx = std::size_t(y) * resolution + x;
      if (table.face[idx] != GBuffer::kNone) {
        ++table.overlap_count;
        return;
      }
      table.face[idx] = static_cast<std::int32_t>(f);
      table.bary[idx] = l;
      table.position[idx] = l[0] * mesh.position(f, 0) + l[1] * mesh.position(f, 1) + l[2] * mesh.position(f, 2);
      table.normal[idx] = normal;
      ++table.assigned_count;
    });
  }
  return table;
}

LabelUV bake_view(const TexelSampleTable& table, const GBuffer& gbuffer, const LabelMap& labels,
                  const CameraPose& pose, int view_index, const BakeOptions& options) {
  if (gbuffer.width != labels.width || gbuffer.height != labels.height || gbuffer.width != pose.width ||
      gbuffer.height != pose.height) {
    throw Error(ErrorCode::ShapeMismatch, "G-buffer, label map and pose resolution disagree for view " +
                                              std::to_string(view_index));
  }
  const Camera camera(pose);
  const double bias = options.depth_bias_fraction * pose.radius;
  LabelUV out(table.resolution, view_index, kBackgroundLabel);

  for (std::size_t t = 0; t < table.texel_count(); ++t) {
    if (!table.assigned(t)) continue;
    const Vec3& p = table.position[t];
    const Vec3 to_eye = camera.eye() - p;
    const double dist = to_eye.norm();
    if (!(dist > 0.0)) continue;
    const double facing = table.normal[t].dot(to_eye) / dist;
    if (facing < options.min_facing) continue;

    const auto sp = camera.project(p);
    if (!sp || sp->x < 0.0 || sp->y < 0.0 || sp->x >= pose.width || sp->y >= pose.height) continue;
    const int px = static_cast<int>(sp->x);
    const int py = static_cast<int>(sp->y);
    const std::size_t pix = gbuffer.index(px, py);
    if (gbuffer.face[pix] == GBuffer::kNone) continue;
    const std::uint8_t label = labels.labels[pix];
    if (label == kBackgroundLabel) continue;

    const double slope = std::sqrt(std::max(0.0, 1.0 - facing * facing)) / facing;
    const double tolerance = bias + camera.pixel_footprint(sp->depth) * slope;
    if (std::abs(sp->depth - gbuffer.depth[pix]) > tolerance) continue;
    out.labels[t] = label;
  }
  return out;
}

}  // namespace matbake
