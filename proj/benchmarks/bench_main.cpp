#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "matbake/camera.hpp"
#include "matbake/fusion.hpp"
#include "matbake/raster.hpp"
#include "matbake/schedule.hpp"
#include "matbake/uv_bake.hpp"

using namespace matbake;

namespace {

// Latitude-longitude sphere with an equirectangular UV layout.
TriangleMesh uv_sphere(int rings, int segments) {
  TriangleMesh m;
  for (int r = 0; r <= rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    for (int s = 0; s <= segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      m.positions.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
      m.uvs.emplace_back(double(s) / segments, 1.0 - double(r) / rings);
    }
  }
  const int row = segments + 1;
  for (int r = 0; r < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = r * row + s;
      const int b = a + row;
      if (r > 0) m.faces.push_back({Corner{a, a}, Corner{b, b}, Corner{a + 1, a + 1}});
      if (r + 1 < rings) m.faces.push_back({Corner{a + 1, a + 1}, Corner{b, b}, Corner{b + 1, b + 1}});
    }
  }
  return m;
}

void BM_RasterizeGBuffer(benchmark::State& state) {
  const TriangleMesh mesh = uv_sphere(64, 128);
  CameraPose pose;
  pose.elevation = 15.0;
  pose.width = pose.height = int(state.range(0));
  const Camera camera(pose);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_gbuffer(mesh, camera));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_RasterizeGBuffer)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_RasterizeUV(benchmark::State& state) {
  const TriangleMesh mesh = uv_sphere(64, 128);
  const int res = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_uv(mesh, res));
  state.SetItemsProcessed(state.iterations() * res * res);
}
BENCHMARK(BM_RasterizeUV)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_AccumulateVote(benchmark::State& state) {
  const int res = int(state.range(0));
  const auto schedule = build_schedule(0);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cls(0, 14);
  std::vector<LabelUV> stack;
  for (std::size_t v = 0; v < schedule.size(); ++v) {
    LabelUV l(res, int(v));
    for (auto& x : l.labels) {
      const int c = cls(rng);
      x = c == 14 ? kBackgroundLabel : std::uint8_t(c);
    }
    stack.push_back(std::move(l));
  }
  const FusionConfig cfg;
  const auto threads = std::size_t(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(vote(accumulate(stack, schedule, cfg, threads), cfg));
  state.SetItemsProcessed(state.iterations() * res * res * std::int64_t(schedule.size()));
}
BENCHMARK(BM_AccumulateVote)->Args({512, 1})->Args({512, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
