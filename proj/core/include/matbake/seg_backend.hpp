#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "matbake/image.hpp"
#include "matbake/labels.hpp"

namespace matbake {

/// Source of per-view material label maps. Implementations must tolerate
/// concurrent infer() calls.
class SegmentationBackend {
 public:
  virtual ~SegmentationBackend() = default;

  virtual std::string name() const = 0;

  /// Raw backend output. Callers should go through segment(), which validates.
  virtual LabelMap infer(const TextureImage& image, std::size_t view_index) = 0;
};

/// Runs the backend and enforces the shared contract: same dimensions as the
/// input (ShapeMismatch), values in {0..13, 255} (ProtocolError), and 255 on
/// every pixel whose input alpha is 0 regardless of what the backend said.
LabelMap segment(SegmentationBackend& backend, const TextureImage& image, std::size_t view_index);

struct PaletteEntry {
  Rgb color;
  std::uint8_t class_id;
};

/// Colour-to-class table for the oracle backend. Colours are pairwise
/// distinct and every class id is a real class (not 255).
class OraclePalette {
 public:
  explicit OraclePalette(std::vector<PaletteEntry> entries);

  /// JSON: {"entries": [{"class": "metal" | 0, "color": [r, g, b]}, ...]}
  static OraclePalette load(const std::filesystem::path& path);

  const std::vector<PaletteEntry>& entries() const noexcept { return entries_; }

  /// Nearest colour in RGB Euclidean distance; ties go to the lowest class id.
  std::uint8_t classify(const Rgb& color) const noexcept;

 private:
  std::vector<PaletteEntry> entries_;
};

LabelMap oracle_segment(const OraclePalette& palette, const TextureImage& image);

class OracleBackend final : public SegmentationBackend {
 public:
  explicit OracleBackend(OraclePalette palette) : palette_(std::move(palette)) {}

  std::string name() const override { return "oracle"; }
  LabelMap infer(const TextureImage& image, std::size_t view_index) override;

 private:
  OraclePalette palette_;
};

/// Reads precomputed labels from `<dir>/view_{i:03}.png` (8-bit, value = id).
class DirectoryBackend final : public SegmentationBackend {
 public:
  explicit DirectoryBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::string name() const override { return "dir"; }
  LabelMap infer(const TextureImage& image, std::size_t view_index) override;

  static std::string view_file_name(std::size_t view_index);

 private:
  std::filesystem::path dir_;
};

struct HttpBackendOptions {
  std::string endpoint;  // e.g. http://127.0.0.1:8080 or http://host/prefix
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_multiplier = 2.0;
  int max_concurrency = 4;
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{120};
};

struct HttpSegmentResult {
  LabelMap labels;
  int retry_count = 0;
};

/// Client for `POST {endpoint}/segment`: RGBA PNG in, 8-bit grayscale PNG of
/// the same size out, both as Content-Type image/png. An 8-bit palette PNG is
/// read by its raw indices. Connection failures,
/// 5xx and 429 are retried with exponential backoff; other statuses fail
/// immediately.
class HttpBackend final : public SegmentationBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  ~HttpBackend() override;

  std::string name() const override { return "http"; }
  LabelMap infer(const TextureImage& image, std::size_t view_index) override;

  HttpSegmentResult http_segment(const TextureImage& image);

  /// Retries accumulated over all calls on this backend.
  int total_retries() const noexcept { return total_retries_.load(); }

 private:
  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
  std::atomic<int> total_retries_{0};
};

}  // namespace matbake
