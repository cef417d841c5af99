#include "matbake/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "matbake/error.hpp"

namespace matbake {
namespace {

struct PngErrorContext {
  char message[256] = "unknown libpng error";
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngErrorContext*>(png_get_error_ptr(png));
  if (ctx != nullptr) {
    std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg);
  }
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct ReadCursor {
  const std::uint8_t* data = nullptr;
  std::size_t size = 0;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->pos + count > cursor->size) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, cursor->data + cursor->pos, count);
  cursor->pos += count;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + count);
}

void flush_noop(png_structp) {}

enum class DecodeMode { ExpandRgba, RawGray8, GrayOnly8 };

// Everything that must survive a longjmp lives here, owned by the caller.
struct DecodeTarget {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  bool unsupported_layout = false;
};

bool decode_impl(std::span<const std::uint8_t> bytes, DecodeMode mode, DecodeTarget& target,
                 PngErrorContext& ctx) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    std::snprintf(ctx.message, sizeof(ctx.message), "not a PNG stream");
    return false;
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  ReadCursor cursor{bytes.data(), bytes.size(), 0};

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  std::size_t channels = 4;

  if (mode == DecodeMode::ExpandRgba) {
    png_set_strip_16(png);
    png_set_packing(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(png);
    }
    if (!(color_type & PNG_COLOR_MASK_ALPHA) && !png_get_valid(png, info, PNG_INFO_tRNS)) {
      png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    }
  } else {
    const bool gray8 = color_type == PNG_COLOR_TYPE_GRAY && bit_depth == 8;
    const bool indexed = color_type == PNG_COLOR_TYPE_PALETTE && mode == DecodeMode::RawGray8;
    if (!gray8 && !indexed) {
      target.unsupported_layout = true;
      std::snprintf(ctx.message, sizeof(ctx.message),
                    "expected 8-bit single-channel PNG (color type %d, depth %d)", color_type,
                    bit_depth);
      png_destroy_read_struct(&png, &info, nullptr);
      return false;
    }
    if (indexed && bit_depth < 8) png_set_packing(png);
    channels = 1;
  }
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != width * channels) {
    std::snprintf(ctx.message, sizeof(ctx.message), "unexpected row layout after conversion");
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  target.width = static_cast<int>(width);
  target.height = static_cast<int>(height);
  target.pixels.assign(std::size_t(width) * height * channels, 0);
  target.rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    target.rows[y] = target.pixels.data() + std::size_t(y) * width * channels;
  }
  png_read_image(png, target.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct EncodeTarget {
  std::vector<std::uint8_t> bytes;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> scratch;
};

struct EncodeSpec {
  int width;
  int height;
  int color_type;
  int bit_depth;
  const std::uint8_t* pixels;  // row-major, tightly packed, already in PNG byte order
  std::size_t row_bytes;
  std::span<const Rgb> palette;
};

bool encode_impl(const EncodeSpec& spec, EncodeTarget& target, PngErrorContext& ctx) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &target.bytes, write_to_vector, flush_noop);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(spec.width), static_cast<png_uint_32>(spec.height),
               spec.bit_depth, spec.color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);

  png_color plte[256];
  png_byte trans[256];
  if (spec.color_type == PNG_COLOR_TYPE_PALETTE) {
    for (int i = 0; i < 256; ++i) {
      const bool have = std::size_t(i) < spec.palette.size();
      plte[i].red = have ? spec.palette[i][0] : 0;
      plte[i].green = have ? spec.palette[i][1] : 0;
      plte[i].blue = have ? spec.palette[i][2] : 0;
      trans[i] = 255;
    }
    trans[255] = 0;
    png_set_PLTE(png, info, plte, 256);
    png_set_tRNS(png, info, trans, 256, nullptr);
  }

  target.rows.resize(std::size_t(spec.height));
  for (int y = 0; y < spec.height; ++y) {
    target.rows[y] = const_cast<png_bytep>(spec.pixels + std::size_t(y) * spec.row_bytes);
  }
  png_set_rows(png, info, target.rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

std::vector<std::uint8_t> encode_or_throw(const EncodeSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot encode an empty image");
  }
  EncodeTarget target;
  PngErrorContext ctx;
  if (!encode_impl(spec, target, ctx)) {
    throw Error(ErrorCode::IoError, std::string("PNG encode failed: ") + ctx.message);
  }
  return std::move(target.bytes);
}

}  // namespace

std::vector<std::uint8_t> encode_png(const TextureImage& image) {
  return encode_or_throw({image.width, image.height, PNG_COLOR_TYPE_RGBA, 8, image.pixels.data(),
                          std::size_t(image.width) * 4, {}});
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  return encode_or_throw({image.width, image.height, PNG_COLOR_TYPE_GRAY, 8, image.pixels.data(),
                          std::size_t(image.width), {}});
}

std::vector<std::uint8_t> encode_png_gray16(int width, int height, std::span<const std::uint16_t> values) {
  if (values.size() != std::size_t(width) * std::size_t(height)) {
    throw Error(ErrorCode::ShapeMismatch, "gray16 buffer does not match dimensions");
  }
  std::vector<std::uint8_t> big_endian(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    big_endian[2 * i] = static_cast<std::uint8_t>(values[i] >> 8);
    big_endian[2 * i + 1] = static_cast<std::uint8_t>(values[i] & 0xFF);
  }
  return encode_or_throw({width, height, PNG_COLOR_TYPE_GRAY, 16, big_endian.data(), std::size_t(width) * 2, {}});
}

std::vector<std::uint8_t> encode_png_indexed(const GrayImage& indices, std::span<const Rgb> palette) {
  return encode_or_throw({indices.width, indices.height, PNG_COLOR_TYPE_PALETTE, 8, indices.pixels.data(),
                          std::size_t(indices.width), palette});
}

TextureImage decode_texture(std::span<const std::uint8_t> bytes) {
  DecodeTarget target;
  PngErrorContext ctx;
  if (!decode_impl(bytes, DecodeMode::ExpandRgba, target, ctx)) {
    throw Error(ErrorCode::DecodeError, ctx.message);
  }
  TextureImage image;
  image.width = target.width;
  image.height = target.height;
  image.pixels = std::move(target.pixels);
  return image;
}

GrayImage decode_gray8(std::span<const std::uint8_t> bytes, bool allow_palette) {
  DecodeTarget target;
  PngErrorContext ctx;
  if (!decode_impl(bytes, allow_palette ? DecodeMode::RawGray8 : DecodeMode::GrayOnly8, target, ctx)) {
    throw Error(ErrorCode::DecodeError, ctx.message);
  }
  GrayImage image;
  image.width = target.width;
  image.height = target.height;
  image.pixels = std::move(target.pixels);
  return image;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

TextureImage load_texture(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_texture(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

GrayImage load_gray8(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_gray8(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_image(const TextureImage& image, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(image));
}

void write_image(const GrayImage& image, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(image));
}

namespace {

// Texel coordinates of a UV sample: v = 0 is the bottom row.
inline void uv_to_texel(double u, double v, int width, int height, double& x, double& y) noexcept {
  x = u * width - 0.5;
  y = (1.0 - v) * height - 0.5;
}

}  // namespace

std::array<double, 4> sample_bilinear(const TextureImage& image, double u, double v) noexcept {
  if (image.empty()) return {0, 0, 0, 0};
  double x, y;
  uv_to_texel(u, v, image.width, image.height, x, y);
  x = std::clamp(x, 0.0, double(image.width - 1));
  y = std::clamp(y, 0.0, double(image.height - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, image.width - 1);
  const int y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  std::array<double, 4> out{};
  const auto* p00 = image.at(x0, y0);
  const auto* p10 = image.at(x1, y0);
  const auto* p01 = image.at(x0, y1);
  const auto* p11 = image.at(x1, y1);
  for (int c = 0; c < 4; ++c) {
    const double top = p00[c] + (p10[c] - p00[c]) * fx;
    const double bottom = p01[c] + (p11[c] - p01[c]) * fx;
    out[c] = top + (bottom - top) * fy;
  }
  return out;
}

double sample_bilinear(const GrayImage& image, double u, double v) noexcept {
  if (image.width <= 0 || image.height <= 0) return 0.0;
  double x, y;
  uv_to_texel(u, v, image.width, image.height, x, y);
  x = std::clamp(x, 0.0, double(image.width - 1));
  y = std::clamp(y, 0.0, double(image.height - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, image.width - 1);
  const int y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = image.at(x0, y0) + (image.at(x1, y0) - image.at(x0, y0)) * fx;
  const double bottom = image.at(x0, y1) + (image.at(x1, y1) - image.at(x0, y1)) * fx;
  return top + (bottom - top) * fy;
}

}  // namespace matbake
