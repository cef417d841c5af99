// matbake command line: bake, schedule, eval, preview.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "matbake/error.hpp"
#include "matbake/metrics.hpp"
#include "matbake/pipeline.hpp"
#include "matbake/png_io.hpp"
#include "matbake/preview.hpp"

namespace fs = std::filesystem;
using namespace matbake;

namespace {

const std::map<std::string, BackendKind> kBackends{
    {"http", BackendKind::Http}, {"dir", BackendKind::Directory}, {"oracle", BackendKind::Oracle}};

int cmd_schedule(std::uint64_t seed) {
  const auto schedule = build_schedule(seed);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& p = schedule.poses[i];
    std::printf("%2zu elev=%+9.4f azim=%8.4f %s\n", i, p.elevation, p.azimuth, p.manual ? "manual" : "auto");
  }
  return 0;
}

struct EvalArgs {
  fs::path pred;
  fs::path gt;
  std::vector<std::string> renders;
  std::vector<std::string> references;
  fs::path json;
};

int cmd_eval(const EvalArgs& args) {
  if (args.renders.size() != args.references.size()) {
    throw Error(ErrorCode::LengthMismatch, "--render and --reference must be given the same number of times");
  }
  nlohmann::ordered_json report;
  if (!args.pred.empty() || !args.gt.empty()) {
    if (args.pred.empty() || args.gt.empty()) throw Error(ErrorCode::InvalidArgument, "--pred and --gt go together");
    const auto r = miou(load_label_uv(args.pred), load_label_uv(args.gt));
    std::printf("%-16s %10s %10s %10s\n", "class", "gt", "pred", "iou");
    auto& classes = report["classes"] = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kClassCount; ++c) {
      const auto& k = r.classes[c];
      if (!k.iou) continue;
      std::printf("%-16s %10zu %10zu %10.4f\n", std::string(kClassNames[c]).c_str(), k.gt_count, k.pred_count, *k.iou);
      classes[std::string(kClassNames[c])] = {{"iou", *k.iou}, {"gt", k.gt_count}, {"pred", k.pred_count}};
    }
    std::printf("mIoU %.6f over %zu classes, %zu texels\n", r.mean_iou, r.classes_in_gt, r.evaluated_texels);
    report["miou"] = r.mean_iou;
    report["classes_in_gt"] = r.classes_in_gt;
    report["evaluated_texels"] = r.evaluated_texels;
  }
  auto& images = report["images"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < args.renders.size(); ++i) {
    const auto a = load_texture(args.renders[i]);
    const auto b = load_texture(args.references[i]);
    const double p = psnr(a, b);
    const double s = ssim(a, b);
    std::printf("%s vs %s: PSNR %.4f dB, SSIM %.6f\n", args.renders[i].c_str(), args.references[i].c_str(), p, s);
    images.push_back({{"render", args.renders[i]},
                      {"reference", args.references[i]},
                      {"psnr", std::isinf(p) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(p)},
                      {"ssim", s}});
  }
  if (!args.json.empty()) {
    const std::string text = report.dump(2) + "\n";
    write_file_atomic(args.json, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  return 0;
}

struct PreviewArgs {
  fs::path asset;
  fs::path albedo;
  fs::path pbr_dir;
  double elevation = 15.0;
  double azimuth = 0.0;
  std::vector<double> light{-1.0, -1.0, -1.0};
  int resolution = 1024;
  fs::path out = "preview.png";
};

int cmd_preview(const PreviewArgs& args) {
  PBRMaps pbr;
  pbr.metallic = load_gray8(args.pbr_dir / "metallic.png");
  pbr.roughness = load_gray8(args.pbr_dir / "roughness.png");
  Asset asset = load_asset(args.asset, args.albedo);
  CameraPose pose;
  pose.elevation = args.elevation;
  pose.azimuth = args.azimuth;
  pose.width = pose.height = args.resolution;
  validate_pose(pose);
  PreviewOptions opts;
  const Vec3 dir(args.light[0], args.light[1], args.light[2]);
  if (!(dir.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "light direction must be non-zero");
  opts.light.direction = dir.normalized();
  write_image(render_preview(asset, pbr, pose, opts), args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matbake: per-texel material labels and PBR maps for textured meshes"};
  app.set_config("--config", "", "INI/TOML file with default option values (flags win)");
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string backend = "oracle";
  if (const char* env = std::getenv("MATBAKE_THREADS")) {
    try {
      cfg.threads = std::stoul(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring MATBAKE_THREADS=" << env << "\n";
    }
  }
  auto* bake = app.add_subcommand("bake", "run the full pipeline on one asset");
  bake->add_option("--asset", cfg.asset, "OBJ mesh")->required();
  bake->add_option("--albedo", cfg.albedo, "albedo PNG (default: map_Kd from the OBJ's MTL)");
  bake->add_option("--backend", backend, "segmentation backend")->transform(CLI::IsMember(kBackends));
  bake->add_option("--endpoint", cfg.endpoint, "HTTP backend base URL");
  bake->add_option("--labels-dir", cfg.labels_dir, "directory of view_NNN.png label maps");
  bake->add_option("--palette", cfg.palette, "oracle palette JSON (default: table display colours)");
  bake->add_option("--seed", cfg.seed, "view schedule seed");
  bake->add_option("--render-res", cfg.render_resolution, "render resolution");
  bake->add_option("--uv-res", cfg.uv_resolution, "label UV resolution");
  bake->add_option("--alpha", cfg.fusion.alpha, "manual view vote weight");
  bake->add_option("--min-region", cfg.fusion.unify_min_region, "unification size threshold (fraction of texels)");
  bake->add_option("--dominance", cfg.fusion.unify_dominance, "chart dominance for hole filling");
  bake->add_option("--material-table", cfg.material_table, "material table INI");
  bake->add_option("--out", cfg.out_dir, "output directory");
  bake->add_option("--threads", cfg.threads, "thread cap (env MATBAKE_THREADS)");
  bake->add_option("--http-concurrency", cfg.http_max_concurrency, "in-flight HTTP requests");
  bake->add_flag("--debug-dump", cfg.debug_dump, "write per-view renders, depth and baked labels");

  std::uint64_t schedule_seed = 0;
  auto* schedule = app.add_subcommand("schedule", "list the 41 camera poses for a seed");
  schedule->add_option("seed", schedule_seed, "schedule seed")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "mIoU between label UVs, PSNR/SSIM between renders");
  eval->add_option("--pred", eval_args.pred, "predicted label UV PNG");
  eval->add_option("--gt", eval_args.gt, "ground-truth label UV PNG");
  eval->add_option("--render", eval_args.renders, "rendered image (repeatable)");
  eval->add_option("--reference", eval_args.references, "reference image, paired with --render");
  eval->add_option("--json", eval_args.json, "write the report as JSON");

  PreviewArgs prev;
  auto* preview = app.add_subcommand("preview", "relight an asset with baked PBR maps");
  preview->add_option("--asset", prev.asset, "OBJ mesh")->required();
  preview->add_option("--albedo", prev.albedo, "albedo PNG");
  preview->add_option("--pbr", prev.pbr_dir, "directory holding metallic.png and roughness.png")->required();
  preview->add_option("--elev", prev.elevation, "camera elevation, degrees");
  preview->add_option("--azim", prev.azimuth, "camera azimuth, degrees");
  preview->add_option("--light", prev.light, "light travel direction x y z")->expected(3);
  preview->add_option("--render-res", prev.resolution, "image size");
  preview->add_option("--out", prev.out, "output PNG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bake) {
      cfg.backend = kBackends.at(backend);
      const auto summary = run_bake(cfg);
      std::printf("%zu views, %zu unassigned texels\nmanifest: %s\n", summary.views, summary.unassigned_texels,
                  summary.manifest.string().c_str());
      return 0;
    }
    if (*schedule) return cmd_schedule(schedule_seed);
    if (*eval) return cmd_eval(eval_args);
    if (*preview) return cmd_preview(prev);
  } catch (const Error& e) {
    std::cerr << "matbake: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "matbake: internal error: " << e.what() << "\n";
    return 70;
  }
  return 1;
}
