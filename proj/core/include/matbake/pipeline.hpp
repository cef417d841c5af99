#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "matbake/asset_io.hpp"
#include "matbake/fusion.hpp"
#include "matbake/material.hpp"
#include "matbake/render.hpp"
#include "matbake/schedule.hpp"
#include "matbake/seg_backend.hpp"
#include "matbake/uv_bake.hpp"

namespace matbake {

inline constexpr const char* kVersion = "0.3.0";

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Hooks for debug dumps, called from worker threads.
struct ViewObserver {
  std::function<void(std::size_t view, const RenderedView&)> on_render;
  std::function<void(std::size_t view, const LabelUV&)> on_bake;
};

struct BakeSettings {
  std::uint64_t seed = 0;
  RenderSettings render;
  int uv_resolution = 1024;
  FusionConfig fusion;
  BakeOptions bake;
  std::size_t threads = 1;
  ViewObserver observer;
};

struct BakeResult {
  ViewSchedule schedule;
  TexelSampleTable table;
  std::vector<LabelUV> view_labels;
  VoteHistogram histogram;
  LabelUV voted;
  LabelUV unified;
  UnifyStats unify;
  std::vector<StageTiming> timings;
};

/// In-memory label fusion for a normalized asset: schedule -> render ->
/// segment -> bake per view (views run in parallel), then vote and region
/// unification. Output is independent of `threads`. Stage failures are
/// rethrown as StageError.
BakeResult bake_labels(const Asset& asset, SegmentationBackend& backend, const BakeSettings& settings);

enum class BackendKind { Http, Directory, Oracle };

struct PipelineConfig {
  std::filesystem::path asset;
  std::filesystem::path albedo;  // optional: falls back to the OBJ's map_Kd
  std::uint64_t seed = 0;
  int render_resolution = 1024;
  int uv_resolution = 1024;
  BackendKind backend = BackendKind::Oracle;
  std::string endpoint;
  std::filesystem::path labels_dir;
  std::filesystem::path palette;  // optional: defaults to the table's display colours
  FusionConfig fusion;
  std::filesystem::path material_table;  // optional: built-in defaults
  std::filesystem::path out_dir = "out";
  bool debug_dump = false;
  std::size_t threads = 1;
  int http_max_concurrency = 4;

  /// Throws InvalidArgument: resolutions must be powers of two in [64, 8192].
  void validate() const;
};

std::unique_ptr<SegmentationBackend> make_backend(const PipelineConfig& config, const MaterialTable& table);

/// Default oracle palette: each class's display colour.
OraclePalette palette_from_table(const MaterialTable& table);

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  std::filesystem::path manifest;
  std::size_t unassigned_texels = 0;
  std::size_t views = 0;
};

/// File-based bake: writes material_labels.png, metallic.png, roughness.png,
/// material_labels_vis.png, preview_e{elev}_a{azim}.png for the five manual
/// views and manifest.json into config.out_dir.
RunSummary run_bake(const PipelineConfig& config);

/// Stable 64-bit FNV-1a, used for the manifest's config hash.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace matbake
