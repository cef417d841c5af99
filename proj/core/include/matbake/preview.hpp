#pragma once

#include <vector>

#include <Eigen/Core>

#include "matbake/asset_io.hpp"
#include "matbake/camera.hpp"
#include "matbake/image.hpp"
#include "matbake/material.hpp"

namespace matbake {

/// Light travelling along `direction` (unit); `intensity` is RGB radiance scale.
struct DirectionalLight {
  Vec3 direction = Vec3(-1.0, -1.0, -1.0).normalized();
  Vec3 intensity = Vec3(1.0, 1.0, 1.0);
};

struct PreviewOptions {
  DirectionalLight light;
  double ambient = 0.08;
};

namespace brdf {

/// GGX / Trowbridge-Reitz normal distribution, alpha = roughness^2.
double ggx_distribution(double n_dot_h, double alpha) noexcept;

/// Smith masking for GGX, one direction.
double smith_g1(double n_dot_x, double alpha) noexcept;

Vec3 fresnel_schlick(const Vec3& f0, double cos_theta) noexcept;

/// Single-scatter specular lobe D * G * F / (4 (n.l) (n.v)); zero below the
/// horizon of either direction.
Vec3 specular(const Vec3& n, const Vec3& l, const Vec3& v, const Vec3& f0, double roughness) noexcept;

/// F0 = mix(0.04, albedo, metallic).
Vec3 base_reflectance(const Vec3& albedo, double metallic) noexcept;

/// Outgoing radiance toward v for one directional light plus ambient:
/// intensity * (n.l) * ((1 - metallic) * albedo + pi * specular) + ambient * albedo.
Vec3 shade(const Vec3& n, const Vec3& l, const Vec3& v, const Vec3& albedo, double metallic, double roughness,
           const Vec3& light_intensity, double ambient) noexcept;

}  // namespace brdf

/// Unclamped preview radiance; `covered` is 0 on background pixels.
struct LinearImage {
  int width = 0;
  int height = 0;
  std::vector<Vec3> rgb;
  std::vector<std::uint8_t> covered;
};

LinearImage render_preview_linear(const Asset& asset, const PBRMaps& pbr, const CameraPose& pose,
                                  const PreviewOptions& options = {});

/// Relit preview clamped to 8 bits; background stays transparent.
TextureImage render_preview(const Asset& asset, const PBRMaps& pbr, const CameraPose& pose,
                            const PreviewOptions& options = {});

}  // namespace matbake
