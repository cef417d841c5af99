#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "matbake/image.hpp"
#include "matbake/labels.hpp"

namespace matbake {

struct MaterialEntry {
  double metallic = 0.0;
  double roughness = 0.8;
  Rgb display_color{0, 0, 0};

  friend bool operator==(const MaterialEntry&, const MaterialEntry&) = default;
};

/// Class id -> PBR parameters. `unassigned` applies to texels without a label.
struct MaterialTable {
  std::array<MaterialEntry, kClassCount> classes{};
  MaterialEntry unassigned{0.0, 0.8, {0, 0, 0}};

  /// Built-in editorial values. They are plausible starting points, not
  /// measurements; every entry can be overridden from a table file.
  static MaterialTable defaults();

  const MaterialEntry& lookup(std::uint8_t label) const noexcept {
    return label < kClassCount ? classes[label] : unassigned;
  }

  /// 256-entry palette for indexed label PNGs: class colours, black elsewhere.
  std::vector<Rgb> label_palette() const;

  friend bool operator==(const MaterialTable&, const MaterialTable&) = default;
};

/// INI-style table, one section per class name plus an optional
/// `[unassigned]` section:
///
///     [metal]
///     metallic = 1.0
///     roughness = 0.3
///     display_color = 180, 180, 190
///
/// Missing classes raise MissingClass, values outside [0, 1] RangeError.
MaterialTable parse_material_table(std::istream& in, const std::string& source_name = "<stream>");
MaterialTable load_material_table(const std::filesystem::path& path);
std::string serialize_material_table(const MaterialTable& table);

/// Nearest 8-bit encoding, halves rounded away from zero (0.5 -> 128).
std::uint8_t unit_to_byte(double value) noexcept;

struct PBRMaps {
  GrayImage metallic;
  GrayImage roughness;
  TextureImage label_vis;        // display colours, alpha 0 where nothing was written
  LabelUV labels;                // labels after chart-border dilation
  std::size_t unassigned_count = 0;  // 255 texels in the input, before dilation
};

/// Grows labels into 255 texels by `iterations` rings (8-neighbourhood,
/// most frequent neighbour label, ties to the lowest id). Labelled texels are
/// never modified.
LabelUV dilate_labels(const LabelUV& labels, int iterations);

/// Per-texel table lookup after a 2-texel dilation pass; remaining 255
/// texels receive the table's unassigned defaults.
PBRMaps emit_pbr(const LabelUV& fused, const MaterialTable& table, int dilation = 2);

}  // namespace matbake
