#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "matbake/image.hpp"

namespace matbake {

inline constexpr std::size_t kClassCount = 14;
inline constexpr std::uint8_t kBackgroundLabel = 255;

/// Material vocabulary; the position in this list is the class id.
inline constexpr std::array<std::string_view, kClassCount> kClassNames = {
    "metal",  "wood",    "plastic", "glass", "paint",     "rubber",          "leather",
    "fabric", "fruit&leaf", "flower", "brick", "porcelain", "clay_terracotta", "concrete"};

namespace material {
inline constexpr std::uint8_t kMetal = 0;
inline constexpr std::uint8_t kWood = 1;
inline constexpr std::uint8_t kPlastic = 2;
inline constexpr std::uint8_t kGlass = 3;
inline constexpr std::uint8_t kPaint = 4;
inline constexpr std::uint8_t kRubber = 5;
inline constexpr std::uint8_t kLeather = 6;
inline constexpr std::uint8_t kFabric = 7;
inline constexpr std::uint8_t kFruitLeaf = 8;
inline constexpr std::uint8_t kFlower = 9;
inline constexpr std::uint8_t kBrick = 10;
inline constexpr std::uint8_t kPorcelain = 11;
inline constexpr std::uint8_t kClayTerracotta = 12;
inline constexpr std::uint8_t kConcrete = 13;
}  // namespace material

constexpr bool is_valid_label(std::uint8_t v) noexcept { return v < kClassCount || v == kBackgroundLabel; }

std::optional<std::uint8_t> class_from_name(std::string_view name) noexcept;

/// Screen-space class ids of one rendered view.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  LabelMap() = default;
  LabelMap(int w, int h, std::uint8_t fill = kBackgroundLabel)
      : width(w), height(h), labels(std::size_t(w) * h, fill) {}

  std::uint8_t at(int x, int y) const noexcept { return labels[std::size_t(y) * width + x]; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

/// Texture-space class ids. `view_index` names the view that produced the map,
/// or kFused for the voted result.
struct LabelUV {
  static constexpr int kFused = -1;

  int resolution = 0;
  std::vector<std::uint8_t> labels;
  int view_index = kFused;

  LabelUV() = default;
  LabelUV(int res, int view, std::uint8_t fill = kBackgroundLabel)
      : resolution(res), labels(std::size_t(res) * res, fill), view_index(view) {}

  std::size_t texel_count() const noexcept { return labels.size(); }

  friend bool operator==(const LabelUV&, const LabelUV&) = default;
};

/// Throws ProtocolError naming the first value outside {0..13, 255}.
void validate_labels(std::span<const std::uint8_t> labels);

GrayImage to_gray(const LabelUV& labels);
LabelUV label_uv_from_gray(const GrayImage& image, int view_index = LabelUV::kFused);

/// Label UVs on disk are palette PNGs (index = class id) so they stay
/// viewable; grayscale files with the same values load identically.
void write_label_uv(const LabelUV& labels, const std::filesystem::path& path, std::span<const Rgb> palette);
LabelUV load_label_uv(const std::filesystem::path& path);

}  // namespace matbake
