#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace matbake {

using Rgb = std::array<std::uint8_t, 3>;

/// Row-major RGBA8 raster. Alpha 0 marks empty texels / background pixels.
struct TextureImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  TextureImage() = default;
  TextureImage(int w, int h) : width(w), height(h), pixels(std::size_t(w) * std::size_t(h) * 4, 0) {}

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t texel_count() const noexcept { return std::size_t(width) * std::size_t(height); }

  std::uint8_t* at(int x, int y) noexcept { return pixels.data() + (std::size_t(y) * width + x) * 4; }
  const std::uint8_t* at(int x, int y) const noexcept {
    return pixels.data() + (std::size_t(y) * width + x) * 4;
  }

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a = 255) noexcept {
    auto* p = at(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
    p[3] = a;
  }

  friend bool operator==(const TextureImage&, const TextureImage&) = default;
};

/// Single-channel 8-bit raster (metallic/roughness maps, label rasters on disk).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(std::size_t(w) * std::size_t(h), fill) {}

  std::uint8_t& at(int x, int y) noexcept { return pixels[std::size_t(y) * width + x]; }
  std::uint8_t at(int x, int y) const noexcept { return pixels[std::size_t(y) * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Bilinear RGBA lookup at UV (v = 0 is the bottom image row), clamp-to-edge.
std::array<double, 4> sample_bilinear(const TextureImage& image, double u, double v) noexcept;

/// Bilinear lookup on a grayscale raster, result in [0, 255].
double sample_bilinear(const GrayImage& image, double u, double v) noexcept;

}  // namespace matbake
