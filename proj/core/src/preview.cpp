#include "matbake/preview.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "matbake/error.hpp"
#include "matbake/raster.hpp"
#include "matbake/render.hpp"

namespace matbake {
namespace brdf {

namespace {
constexpr double kMinAlpha = 1e-3;
}

double ggx_distribution(double n_dot_h, double alpha) noexcept {
  if (n_dot_h <= 0.0) return 0.0;
  const double a2 = alpha * alpha;
  const double d = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0;
  return a2 / (std::numbers::pi * d * d);
}

double smith_g1(double n_dot_x, double alpha) noexcept {
  if (n_dot_x <= 0.0) return 0.0;
  const double a2 = alpha * alpha;
  return 2.0 * n_dot_x / (n_dot_x + std::sqrt(a2 + (1.0 - a2) * n_dot_x * n_dot_x));
}

Vec3 fresnel_schlick(const Vec3& f0, double cos_theta) noexcept {
  const double m = std::pow(std::clamp(1.0 - cos_theta, 0.0, 1.0), 5.0);
  return f0 + (Vec3::Ones() - f0) * m;
}

Vec3 base_reflectance(const Vec3& albedo, double metallic) noexcept {
  return Vec3::Constant(0.04) * (1.0 - metallic) + albedo * metallic;
}

Vec3 specular(const Vec3& n, const Vec3& l, const Vec3& v, const Vec3& f0, double roughness) noexcept {
  const double n_dot_l = n.dot(l);
  const double n_dot_v = n.dot(v);
  if (n_dot_l <= 0.0 || n_dot_v <= 0.0) return Vec3::Zero();
  const Vec3 h = (l + v).normalized();
  const double alpha = std::max(roughness * roughness, kMinAlpha);
  const double d = ggx_distribution(n.dot(h), alpha);
  const double g = smith_g1(n_dot_l, alpha) * smith_g1(n_dot_v, alpha);
  const Vec3 f = fresnel_schlick(f0, v.dot(h));
  return f * (d * g / (4.0 * n_dot_l * n_dot_v));
}

Vec3 shade(const Vec3& n, const Vec3& l, const Vec3& v, const Vec3& albedo, double metallic, double roughness,
           const Vec3& light_intensity, double ambient) noexcept {
  Vec3 out = ambient * albedo;
  const double n_dot_l = n.dot(l);
  if (n_dot_l <= 0.0) return out;
  const Vec3 f0 = base_reflectance(albedo, metallic);
  const Vec3 lobe = (1.0 - metallic) * albedo + std::numbers::pi * specular(n, l, v, f0, roughness);
  return out + n_dot_l * light_intensity.cwiseProduct(lobe);
}

}  // namespace brdf

namespace {

Vec3 shading_normal(const TriangleMesh& mesh, std::size_t face, const std::array<double, 3>& bary) {
  const Vec3 geometric = mesh.face_normal(face);
  const auto& c = mesh.faces[face];
  if (c[0].normal == kNoIndex || c[1].normal == kNoIndex || c[2].normal == kNoIndex) return geometric;
  const Vec3 n = bary[0] * mesh.normals[c[0].normal] + bary[1] * mesh.normals[c[1].normal] +
                 bary[2] * mesh.normals[c[2].normal];
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : geometric;
}

}  // namespace

LinearImage render_preview_linear(const Asset& asset, const PBRMaps& pbr, const CameraPose& pose,
                                  const PreviewOptions& options) {
  if (pbr.metallic.width != pbr.roughness.width || pbr.metallic.height != pbr.roughness.height ||
      pbr.metallic.width <= 0) {
    throw Error(ErrorCode::ShapeMismatch, "metallic and roughness maps must share one non-empty resolution");
  }
  const Camera camera(pose);
  const GBuffer gb = rasterize_gbuffer(asset.mesh, camera);
  const Vec3 to_light = -options.light.direction.normalized();

  LinearImage out;
  out.width = pose.width;
  out.height = pose.height;
  out.rgb.assign(std::size_t(pose.width) * pose.height, Vec3::Zero());
  out.covered.assign(out.rgb.size(), 0);
  for (int y = 0; y < gb.height; ++y) {
    for (int x = 0; x < gb.width; ++x) {
      const std::size_t idx = gb.index(x, y);
      if (gb.face[idx] == GBuffer::kNone) continue;
      const auto face = std::size_t(gb.face[idx]);
      const auto& bary = gb.bary[idx];
      const Vec2 uv = interpolate_uv(asset.mesh, face, bary);
      const Vec3 p = interpolate_position(asset.mesh, face, bary);
      const Vec3 v = (camera.eye() - p).normalized();
      Vec3 n = shading_normal(asset.mesh, face, bary);
      if (n.dot(v) < 0.0) n = -n;

      const auto rgba = sample_bilinear(asset.albedo, uv.x(), uv.y());
      const Vec3 albedo(rgba[0] / 255.0, rgba[1] / 255.0, rgba[2] / 255.0);
      const double metallic = sample_bilinear(pbr.metallic, uv.x(), uv.y()) / 255.0;
      const double roughness = sample_bilinear(pbr.roughness, uv.x(), uv.y()) / 255.0;
      out.rgb[idx] = brdf::shade(n, to_light, v, albedo, metallic, roughness, options.light.intensity, options.ambient);
      out.covered[idx] = 1;
    }
  }
  return out;
}

TextureImage render_preview(const Asset& asset, const PBRMaps& pbr, const CameraPose& pose,
                            const PreviewOptions& options) {
  const LinearImage linear = render_preview_linear(asset, pbr, pose, options);
  TextureImage image(linear.width, linear.height);
  for (std::size_t i = 0; i < linear.rgb.size(); ++i) {
    if (!linear.covered[i]) continue;
    auto* p = image.pixels.data() + 4 * i;
    for (int c = 0; c < 3; ++c) p[c] = unit_to_byte(linear.rgb[i][c]);
    p[3] = 255;
  }
  return image;
}

}  // namespace matbake
