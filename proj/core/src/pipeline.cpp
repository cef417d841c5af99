#include "matbake/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <mutex>

#include <nlohmann/json.hpp>

#include "matbake/error.hpp"
#include "matbake/parallel.hpp"
#include "matbake/png_io.hpp"
#include "matbake/preview.hpp"

namespace matbake {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

bool is_power_of_two_in_range(int v) { return v >= 64 && v <= 8192 && (v & (v - 1)) == 0; }

std::string indexed_name(const char* prefix, std::size_t i, const char* suffix = ".png") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu%s", prefix, i, suffix);
  return buf;
}

std::string backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::Http: return "http";
    case BackendKind::Directory: return "dir";
    case BackendKind::Oracle: return "oracle";
  }
  return "unknown";
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

BakeResult bake_labels(const Asset& asset, SegmentationBackend& backend, const BakeSettings& settings) {
  settings.fusion.validate();
  BakeResult result;
  result.schedule = build_schedule(settings.seed, settings.render);
  for (const auto& pose : result.schedule.poses) validate_pose(pose);

  auto t0 = Clock::now();
  result.table = run_stage("uv_raster", [&] { return rasterize_uv(asset.mesh, settings.uv_resolution); });
  result.timings.push_back({"uv_raster", seconds_since(t0)});

  const std::size_t n = result.schedule.size();
  result.view_labels.resize(n);
  std::vector<double> render_s(n), segment_s(n), bake_s(n);
  t0 = Clock::now();
  parallel_for(n, settings.threads, [&](std::size_t v) {
    const auto& pose = result.schedule.poses[v];
    auto t = Clock::now();
    const RenderedView view = run_stage("render", [&] { return render_view(asset, pose); });
    render_s[v] = seconds_since(t);
    if (settings.observer.on_render) settings.observer.on_render(v, view);

    t = Clock::now();
    const LabelMap labels = run_stage("segment", [&] { return segment(backend, view.color, v); });
    segment_s[v] = seconds_since(t);

    t = Clock::now();
    result.view_labels[v] = run_stage("bake", [&] {
      return bake_view(result.table, view.gbuffer, labels, pose, static_cast<int>(v), settings.bake);
    });
    bake_s[v] = seconds_since(t);
    if (settings.observer.on_bake) settings.observer.on_bake(v, result.view_labels[v]);
  });
  const double views_wall = seconds_since(t0);
  auto sum = [](const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  };
  result.timings.push_back({"render_cpu", sum(render_s)});
  result.timings.push_back({"segment_cpu", sum(segment_s)});
  result.timings.push_back({"bake_cpu", sum(bake_s)});
  result.timings.push_back({"views_wall", views_wall});

  t0 = Clock::now();
  run_stage("fusion", [&] {
    result.histogram = accumulate(result.view_labels, result.schedule, settings.fusion, settings.threads);
    result.voted = vote(result.histogram, settings.fusion);
    return 0;
  });
  result.timings.push_back({"vote", seconds_since(t0)});

  t0 = Clock::now();
  result.unified = run_stage("unify", [&] {
    return region_unify(result.voted, result.table, asset.mesh, settings.fusion, &result.unify);
  });
  result.timings.push_back({"unify", seconds_since(t0)});
  return result;
}

void PipelineConfig::validate() const {
  if (asset.empty()) throw Error(ErrorCode::InvalidArgument, "an asset path is required");
  if (!is_power_of_two_in_range(render_resolution)) {
    throw Error(ErrorCode::InvalidArgument, "render resolution must be a power of two in [64, 8192]");
  }
  if (!is_power_of_two_in_range(uv_resolution)) {
    throw Error(ErrorCode::InvalidArgument, "UV resolution must be a power of two in [64, 8192]");
  }
  if (threads == 0) throw Error(ErrorCode::InvalidArgument, "thread cap must be positive");
  switch (backend) {
    case BackendKind::Http:
      if (endpoint.empty()) throw Error(ErrorCode::InvalidArgument, "--backend http needs --endpoint");
      break;
    case BackendKind::Directory:
      if (labels_dir.empty()) throw Error(ErrorCode::InvalidArgument, "--backend dir needs --labels-dir");
      break;
    case BackendKind::Oracle: break;
  }
  fusion.validate();
}

OraclePalette palette_from_table(const MaterialTable& table) {
  std::vector<PaletteEntry> entries;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    entries.push_back({table.classes[c].display_color, static_cast<std::uint8_t>(c)});
  }
  return OraclePalette(std::move(entries));
}

std::unique_ptr<SegmentationBackend> make_backend(const PipelineConfig& config, const MaterialTable& table) {
  switch (config.backend) {
    case BackendKind::Http: {
      HttpBackendOptions opts;
      opts.endpoint = config.endpoint;
      opts.max_concurrency = config.http_max_concurrency;
      return std::make_unique<HttpBackend>(opts);
    }
    case BackendKind::Directory: return std::make_unique<DirectoryBackend>(config.labels_dir);
    case BackendKind::Oracle:
      return std::make_unique<OracleBackend>(config.palette.empty() ? palette_from_table(table)
                                                                    : OraclePalette::load(config.palette));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown backend");
}

RunSummary run_bake(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  config.validate();
  const auto run_start = Clock::now();

  auto t0 = Clock::now();
  const MaterialTable table = run_stage("material_table", [&] {
    return config.material_table.empty() ? MaterialTable::defaults() : load_material_table(config.material_table);
  });
  std::size_t dropped = 0;
  const Asset asset = run_stage("load", [&] {
    auto loaded = load_mesh(config.asset);
    dropped = loaded.dropped_degenerate;
    Asset a;
    a.name = config.asset.stem().string();
    a.mesh = normalize_mesh(loaded.mesh);
    fs::path albedo = config.albedo;
    if (albedo.empty() && !loaded.material_library.empty()) {
      albedo = find_albedo_in_mtl(config.asset.parent_path() / loaded.material_library);
    }
    if (albedo.empty()) throw Error(ErrorCode::FileNotFound, "no albedo texture for " + config.asset.string());
    a.albedo = load_texture(albedo);
    return a;
  });
  const double load_s = seconds_since(t0);

  auto backend = run_stage("backend", [&] { return make_backend(config, table); });
  const auto palette = table.label_palette();

  BakeSettings settings;
  settings.seed = config.seed;
  settings.render.width = config.render_resolution;
  settings.render.height = config.render_resolution;
  settings.uv_resolution = config.uv_resolution;
  settings.fusion = config.fusion;
  settings.threads = config.threads;
  const fs::path debug_dir = config.out_dir / "debug";
  if (config.debug_dump) {
    settings.observer.on_render = [&](std::size_t v, const RenderedView& view) {
      write_image(view.color, debug_dir / indexed_name("view", v));
      write_file_atomic(debug_dir / indexed_name("depth", v),
                        encode_png_gray16(view.gbuffer.width, view.gbuffer.height,
                                          depth_to_gray16(view.gbuffer, settings.render.radius)));
    };
    settings.observer.on_bake = [&](std::size_t v, const LabelUV& labels) {
      write_label_uv(labels, debug_dir / indexed_name("bake", v), palette);
    };
  }

  BakeResult baked = bake_labels(asset, *backend, settings);

  t0 = Clock::now();
  const PBRMaps pbr = run_stage("material_pbr", [&] { return emit_pbr(baked.unified, table); });
  const double pbr_s = seconds_since(t0);

  RunSummary summary;
  summary.views = baked.schedule.size();
  summary.unassigned_texels = pbr.unassigned_count;

  t0 = Clock::now();
  std::vector<std::pair<fs::path, TextureImage>> previews;
  std::vector<CameraPose> preview_poses;
  for (const auto& pose : baked.schedule.poses) {
    if (pose.manual) preview_poses.push_back(pose);
  }
  previews.resize(preview_poses.size());
  run_stage("preview", [&] {
    parallel_for(preview_poses.size(), config.threads, [&](std::size_t i) {
      const auto& pose = preview_poses[i];
      char name[64];
      std::snprintf(name, sizeof(name), "preview_e%02d_a%03d.png", int(std::lround(pose.elevation)),
                    int(std::lround(pose.azimuth)));
      previews[i] = {config.out_dir / name, render_preview(asset, pbr, pose)};
    });
    return 0;
  });
  const double preview_s = seconds_since(t0);

  t0 = Clock::now();
  run_stage("write", [&] {
    auto out = [&](const fs::path& p) {
      summary.outputs.push_back(p);
      return p;
    };
    write_label_uv(pbr.labels, out(config.out_dir / "material_labels.png"), palette);
    write_image(pbr.metallic, out(config.out_dir / "metallic.png"));
    write_image(pbr.roughness, out(config.out_dir / "roughness.png"));
    write_image(pbr.label_vis, out(config.out_dir / "material_labels_vis.png"));
    for (const auto& [path, image] : previews) write_image(image, out(path));
    if (config.debug_dump) {
      write_label_uv(baked.voted, debug_dir / "voted_labels.png", palette);
      write_file_atomic(debug_dir / "histogram.bin", baked.histogram.serialize());
    }
    return 0;
  });
  const double write_s = seconds_since(t0);

  nlohmann::ordered_json cfg;
  cfg["asset"] = config.asset.string();
  cfg["albedo"] = config.albedo.string();
  cfg["seed"] = config.seed;
  cfg["render_resolution"] = config.render_resolution;
  cfg["uv_resolution"] = config.uv_resolution;
  cfg["backend"] = backend_name(config.backend);
  cfg["endpoint"] = config.endpoint;
  cfg["labels_dir"] = config.labels_dir.string();
  cfg["palette"] = config.palette.string();
  cfg["alpha"] = config.fusion.alpha;
  cfg["unify_min_region"] = config.fusion.unify_min_region;
  cfg["unify_dominance"] = config.fusion.unify_dominance;
  cfg["material_table"] = config.material_table.string();
  cfg["camera_radius"] = settings.render.radius;
  cfg["fov_y"] = settings.render.fov_y;

  nlohmann::ordered_json manifest;
  manifest["tool"] = "matbake";
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = cfg;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.dump())));
  manifest["config_hash"] = hash;
  manifest["threads"] = config.threads;
  manifest["views"] = baked.schedule.size();
  auto& poses = manifest["poses"] = nlohmann::ordered_json::array();
  for (const auto& p : baked.schedule.poses) {
    poses.push_back({{"elevation", p.elevation}, {"azimuth", p.azimuth}, {"manual", p.manual}});
  }
  manifest["mesh"] = {{"faces", asset.mesh.faces.size()},
                      {"dropped_degenerate", dropped},
                      {"uv_overlap_texels", baked.table.overlap_count}};
  manifest["texels"] = {{"assigned", baked.table.assigned_count},
                        {"unassigned", pbr.unassigned_count},
                        {"holes_filled", baked.unify.holes_filled},
                        {"regions_absorbed", baked.unify.regions_absorbed},
                        {"texels_relabeled", baked.unify.texels_relabeled}};
  if (const auto* http = dynamic_cast<const HttpBackend*>(backend.get())) manifest["http_retries"] = http->total_retries();
  auto& timings = manifest["timings_s"] = nlohmann::ordered_json::object();
  timings["load"] = load_s;
  for (const auto& t : baked.timings) timings[t.stage] = t.seconds;
  timings["material_pbr"] = pbr_s;
  timings["preview"] = preview_s;
  timings["write"] = write_s;
  timings["total"] = seconds_since(run_start);
  auto& outputs = manifest["outputs"] = nlohmann::ordered_json::array();
  for (const auto& p : summary.outputs) outputs.push_back(p.filename().string());

  summary.manifest = config.out_dir / "manifest.json";
  const std::string text = manifest.dump(2) + "\n";
  write_file_atomic(summary.manifest, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return summary;
}

}  // namespace matbake
