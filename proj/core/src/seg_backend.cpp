#include "matbake/seg_backend.hpp"

#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "matbake/error.hpp"
#include "matbake/png_io.hpp"

namespace matbake {

LabelMap segment(SegmentationBackend& backend, const TextureImage& image, std::size_t view_index) {
  if (image.empty()) throw Error(ErrorCode::InvalidArgument, "cannot segment an empty image");
  LabelMap labels = backend.infer(image, view_index);
  if (labels.width != image.width || labels.height != image.height ||
      labels.labels.size() != image.texel_count()) {
    throw Error(ErrorCode::ShapeMismatch, backend.name() + " backend returned " + std::to_string(labels.width) +
                                              "x" + std::to_string(labels.height) + " labels for a " +
                                              std::to_string(image.width) + "x" + std::to_string(image.height) +
                                              " view " + std::to_string(view_index));
  }
  validate_labels(labels.labels);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (image.pixels[4 * i + 3] == 0) labels.labels[i] = kBackgroundLabel;
  }
  return labels;
}

OraclePalette::OraclePalette(std::vector<PaletteEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::InvalidArgument, "oracle palette is empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].class_id >= kClassCount) {
      throw Error(ErrorCode::InvalidArgument, "palette entry " + std::to_string(i) + " has invalid class id");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i].color == entries_[j].color) {
        throw Error(ErrorCode::InvalidArgument, "palette colours must be distinct (entries " + std::to_string(j) +
                                                    " and " + std::to_string(i) + ")");
      }
    }
  }
}

OraclePalette OraclePalette::load(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  std::vector<PaletteEntry> entries;
  try {
    const auto doc = nlohmann::json::parse(bytes.begin(), bytes.end());
    for (const auto& item : doc.at("entries")) {
      PaletteEntry e{};
      const auto& cls = item.at("class");
      if (cls.is_string()) {
        const auto id = class_from_name(cls.get<std::string>());
        if (!id) throw Error(ErrorCode::ParseError, path.string() + ": unknown class '" + cls.get<std::string>() + "'");
        e.class_id = *id;
      } else {
        const int id = cls.get<int>();
        if (id < 0 || id >= int(kClassCount)) throw Error(ErrorCode::ParseError, path.string() + ": class id out of range");
        e.class_id = static_cast<std::uint8_t>(id);
      }
      const auto& color = item.at("color");
      if (!color.is_array() || color.size() != 3) throw Error(ErrorCode::ParseError, path.string() + ": color needs 3 components");
      for (int c = 0; c < 3; ++c) {
        const int v = color[c].get<int>();
        if (v < 0 || v > 255) throw Error(ErrorCode::ParseError, path.string() + ": color component out of range");
        e.color[c] = static_cast<std::uint8_t>(v);
      }
      entries.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return OraclePalette(std::move(entries));
}

std::uint8_t OraclePalette::classify(const Rgb& color) const noexcept {
  int best_dist = std::numeric_limits<int>::max();
  std::uint8_t best_class = entries_.front().class_id;
  for (const auto& e : entries_) {
    int dist = 0;
    for (int c = 0; c < 3; ++c) {
      const int d = int(color[c]) - int(e.color[c]);
      dist += d * d;
    }
    if (dist < best_dist || (dist == best_dist && e.class_id < best_class)) {
      best_dist = dist;
      best_class = e.class_id;
    }
  }
  return best_class;
}

LabelMap oracle_segment(const OraclePalette& palette, const TextureImage& image) {
  LabelMap out(image.width, image.height, kBackgroundLabel);
  for (std::size_t i = 0; i < image.texel_count(); ++i) {
    const auto* p = image.pixels.data() + 4 * i;
    if (p[3] == 0) continue;
    out.labels[i] = palette.classify({p[0], p[1], p[2]});
  }
  return out;
}

LabelMap OracleBackend::infer(const TextureImage& image, std::size_t) { return oracle_segment(palette_, image); }

std::string DirectoryBackend::view_file_name(std::size_t view_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%03zu.png", view_index);
  return buf;
}

LabelMap DirectoryBackend::infer(const TextureImage&, std::size_t view_index) {
  const auto path = dir_ / view_file_name(view_index);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::BackendUnavailable,
                "no labels for view " + std::to_string(view_index) + " (missing " + path.string() + ")");
  }
  GrayImage gray;
  try {
    gray = load_gray8(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ProtocolError, "view " + std::to_string(view_index) + ": " + e.what());
  }
  LabelMap labels;
  labels.width = gray.width;
  labels.height = gray.height;
  labels.labels = std::move(gray.pixels);
  return labels;
}

}  // namespace matbake
