#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "matbake/image.hpp"

namespace matbake {

/// In-memory PNG codecs. All encoders are deterministic (fixed zlib level,
/// no timestamps) so identical rasters produce identical files.
std::vector<std::uint8_t> encode_png(const TextureImage& image);
std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png_gray16(int width, int height, std::span<const std::uint16_t> values);
/// Palette PNG: pixel value = palette index. Entries beyond the palette size
/// are padded black; index 255 is written fully transparent via tRNS.
std::vector<std::uint8_t> encode_png_indexed(const GrayImage& indices, std::span<const Rgb> palette);

/// Decodes any 8-bit (or 16-bit, stripped) PNG into RGBA. Grayscale expands to
/// R=G=B=gray with A=255; palette images expand through their palette.
TextureImage decode_texture(std::span<const std::uint8_t> bytes);

/// Decodes a single-channel 8-bit PNG without any value conversion. Palette
/// images yield their raw indices unless `allow_palette` is false. Any other
/// layout throws DecodeError.
GrayImage decode_gray8(std::span<const std::uint8_t> bytes, bool allow_palette = true);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes via a sibling temporary file and rename, so readers never observe a
/// truncated file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

TextureImage load_texture(const std::filesystem::path& path);
GrayImage load_gray8(const std::filesystem::path& path);

void write_image(const TextureImage& image, const std::filesystem::path& path);
void write_image(const GrayImage& image, const std::filesystem::path& path);

}  // namespace matbake
