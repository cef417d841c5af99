#include "matbake/labels.hpp"

#include <string>

#include "matbake/error.hpp"
#include "matbake/png_io.hpp"

namespace matbake {

std::optional<std::uint8_t> class_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<std::uint8_t>(i);
  }
  return std::nullopt;
}

void validate_labels(std::span<const std::uint8_t> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!is_valid_label(labels[i])) {
      throw Error(ErrorCode::ProtocolError,
                  "label out of range: value " + std::to_string(labels[i]) + " at index " + std::to_string(i));
    }
  }
}

GrayImage to_gray(const LabelUV& labels) {
  GrayImage image;
  image.width = labels.resolution;
  image.height = labels.resolution;
  image.pixels = labels.labels;
  return image;
}

LabelUV label_uv_from_gray(const GrayImage& image, int view_index) {
  if (image.width != image.height) {
    throw Error(ErrorCode::ShapeMismatch, "label UV must be square, got " + std::to_string(image.width) + "x" +
                                              std::to_string(image.height));
  }
  validate_labels(image.pixels);
  LabelUV out;
  out.resolution = image.width;
  out.labels = image.pixels;
  out.view_index = view_index;
  return out;
}

void write_label_uv(const LabelUV& labels, const std::filesystem::path& path, std::span<const Rgb> palette) {
  write_file_atomic(path, encode_png_indexed(to_gray(labels), palette));
}

LabelUV load_label_uv(const std::filesystem::path& path) {
  return label_uv_from_gray(load_gray8(path));
}

}  // namespace matbake
