#include "matbake/material.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "matbake/error.hpp"

namespace matbake {
namespace {

constexpr const char* kUnassignedSection = "unassigned";

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_unit(const boost::property_tree::ptree& section, const std::string& section_name, const char* key,
                  const std::string& source) {
  const auto value = section.get_optional<std::string>(key);
  if (!value) throw Error(ErrorCode::ParseError, source + ": [" + section_name + "] lacks '" + key + "'");
  double v = 0.0;
  std::istringstream in(*value);
  if (!(in >> v) || !(in >> std::ws).eof()) {
    throw Error(ErrorCode::ParseError, source + ": [" + section_name + "] " + key + " is not a number");
  }
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::RangeError, source + ": [" + section_name + "] " + key + " = " + *value + " outside [0, 1]");
  }
  return v;
}

Rgb parse_color(const boost::property_tree::ptree& section, const std::string& section_name, const std::string& source) {
  const auto value = section.get_optional<std::string>("display_color");
  if (!value) return {128, 128, 128};
  std::string text = *value;
  for (auto& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(text);
  Rgb color{};
  for (int i = 0; i < 3; ++i) {
    int component = -1;
    if (!(in >> component)) {
      throw Error(ErrorCode::ParseError, source + ": [" + section_name + "] display_color needs 3 integers");
    }
    if (component < 0 || component > 255) {
      throw Error(ErrorCode::RangeError, source + ": [" + section_name + "] display_color component outside [0, 255]");
    }
    color[i] = static_cast<std::uint8_t>(component);
  }
  return color;
}

MaterialEntry parse_entry(const boost::property_tree::ptree& section, const std::string& name, const std::string& source) {
  MaterialEntry e;
  e.metallic = parse_unit(section, name, "metallic", source);
  e.roughness = parse_unit(section, name, "roughness", source);
  e.display_color = parse_color(section, name, source);
  return e;
}

}  // namespace

MaterialTable MaterialTable::defaults() {
  using namespace material;
  MaterialTable t;
  t.classes[kMetal] = {1.0, 0.3, {160, 165, 175}};
  t.classes[kWood] = {0.0, 0.7, {140, 90, 40}};
  t.classes[kPlastic] = {0.0, 0.4, {230, 30, 30}};
  t.classes[kGlass] = {0.0, 0.1, {120, 220, 240}};
  t.classes[kPaint] = {0.0, 0.5, {250, 200, 0}};
  t.classes[kRubber] = {0.0, 0.9, {40, 40, 40}};
  t.classes[kLeather] = {0.0, 0.6, {120, 50, 20}};
  t.classes[kFabric] = {0.0, 0.95, {60, 80, 200}};
  t.classes[kFruitLeaf] = {0.0, 0.6, {40, 170, 40}};
  t.classes[kFlower] = {0.0, 0.65, {240, 120, 200}};
  t.classes[kBrick] = {0.0, 0.85, {180, 60, 50}};
  t.classes[kPorcelain] = {0.0, 0.15, {245, 245, 235}};
  t.classes[kClayTerracotta] = {0.0, 0.8, {210, 120, 70}};
  t.classes[kConcrete] = {0.0, 0.9, {150, 150, 140}};
  t.unassigned = {0.0, 0.8, {0, 0, 0}};
  return t;
}

std::vector<Rgb> MaterialTable::label_palette() const {
  std::vector<Rgb> palette(256, Rgb{0, 0, 0});
  for (std::size_t c = 0; c < kClassCount; ++c) palette[c] = classes[c].display_color;
  palette[kBackgroundLabel] = unassigned.display_color;
  return palette;
}

MaterialTable parse_material_table(std::istream& in, const std::string& source_name) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::ParseError, source_name + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  MaterialTable table = MaterialTable::defaults();
  std::array<bool, kClassCount> seen{};
  for (const auto& [name, section] : tree) {
    if (name == kUnassignedSection) {
      table.unassigned = parse_entry(section, name, source_name);
      continue;
    }
    const auto id = class_from_name(name);
    if (!id) throw Error(ErrorCode::ParseError, source_name + ": unknown material class [" + name + "]");
    table.classes[*id] = parse_entry(section, name, source_name);
    seen[*id] = true;
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (!seen[c]) throw Error(ErrorCode::MissingClass, std::string(kClassNames[c]));
  }
  return table;
}

MaterialTable load_material_table(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorCode::FileNotFound, path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_material_table(in, path.string());
}

std::string serialize_material_table(const MaterialTable& table) {
  std::ostringstream out;
  auto section = [&](std::string_view name, const MaterialEntry& e) {
    out << '[' << name << "]\n"
        << "metallic = " << format_double(e.metallic) << '\n'
        << "roughness = " << format_double(e.roughness) << '\n'
        << "display_color = " << int(e.display_color[0]) << ", " << int(e.display_color[1]) << ", "
        << int(e.display_color[2]) << "\n\n";
  };
  for (std::size_t c = 0; c < kClassCount; ++c) section(kClassNames[c], table.classes[c]);
  section(kUnassignedSection, table.unassigned);
  return out.str();
}

std::uint8_t unit_to_byte(double value) noexcept {
  if (!(value > 0.0)) return 0;
  if (value >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(value * 255.0));
}

LabelUV dilate_labels(const LabelUV& labels, int iterations) {
  LabelUV current = labels;
  const int res = labels.resolution;
  for (int it = 0; it < iterations; ++it) {
    LabelUV next = current;
    bool grew = false;
    for (int y = 0; y < res; ++y) {
      for (int x = 0; x < res; ++x) {
        const std::size_t t = std::size_t(y) * res + x;
        if (current.labels[t] != kBackgroundLabel) continue;
        std::array<int, kClassCount> votes{};
        bool any = false;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
            const std::uint8_t l = current.labels[std::size_t(ny) * res + nx];
            if (l == kBackgroundLabel) continue;
            ++votes[l];
            any = true;
          }
        }
        if (!any) continue;
        const auto best = std::max_element(votes.begin(), votes.end());
        next.labels[t] = static_cast<std::uint8_t>(best - votes.begin());
        grew = true;
      }
    }
    current = std::move(next);
    if (!grew) break;
  }
  return current;
}

PBRMaps emit_pbr(const LabelUV& fused, const MaterialTable& table, int dilation) {
  PBRMaps maps;
  const int res = fused.resolution;
  maps.unassigned_count =
      static_cast<std::size_t>(std::count(fused.labels.begin(), fused.labels.end(), kBackgroundLabel));
  maps.labels = dilate_labels(fused, dilation);
  maps.metallic = GrayImage(res, res);
  maps.roughness = GrayImage(res, res);
  maps.label_vis = TextureImage(res, res);

  std::array<std::uint8_t, 256> metallic_byte{};
  std::array<std::uint8_t, 256> roughness_byte{};
  for (int l = 0; l < 256; ++l) {
    const auto& e = table.lookup(static_cast<std::uint8_t>(l));
    metallic_byte[l] = unit_to_byte(e.metallic);
    roughness_byte[l] = unit_to_byte(e.roughness);
  }
  for (std::size_t t = 0; t < maps.labels.labels.size(); ++t) {
    const std::uint8_t l = maps.labels.labels[t];
    maps.metallic.pixels[t] = metallic_byte[l];
    maps.roughness.pixels[t] = roughness_byte[l];
    const auto& color = table.lookup(l).display_color;
    auto* p = maps.label_vis.pixels.data() + 4 * t;
    p[0] = color[0];
    p[1] = color[1];
    p[2] = color[2];
    p[3] = l == kBackgroundLabel ? 0 : 255;
  }
  return maps;
}

}  // namespace matbake
