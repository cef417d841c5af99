#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "matbake/asset_io.hpp"
#include "matbake/camera.hpp"

namespace matbake {

/// Per-pixel visibility record of one rendered view.
struct GBuffer {
  static constexpr std::int32_t kNone = -1;

  int width = 0;
  int height = 0;
  std::vector<std::int32_t> face;                // kNone for background
  std::vector<std::array<double, 3>> bary;       // perspective-correct, original corner order
  std::vector<double> depth;                     // view depth, +inf for background

  GBuffer() = default;
  GBuffer(int w, int h)
      : width(w),
        height(h),
        face(std::size_t(w) * h, kNone),
        bary(std::size_t(w) * h, {0.0, 0.0, 0.0}),
        depth(std::size_t(w) * h, std::numeric_limits<double>::infinity()) {}

  std::size_t index(int x, int y) const noexcept { return std::size_t(y) * width + x; }
};

namespace raster {

/// Vertices are snapped to a 1/256 pixel grid before coverage is decided.
inline constexpr int kSubpixelBits = 8;
inline constexpr std::int64_t kSubpixelOne = std::int64_t(1) << kSubpixelBits;
inline constexpr std::int64_t kSubpixelHalf = kSubpixelOne / 2;
/// Snapped coordinates beyond this magnitude are rejected (int64 headroom).
inline constexpr std::int64_t kMaxFixedCoord = std::int64_t(1) << 30;

struct FixedPoint {
  std::int64_t x;
  std::int64_t y;
};

inline std::int64_t snap(double v) noexcept { return std::llround(v * double(kSubpixelOne)); }

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Signed doubled area of (a, b, p) in y-down pixel space.
inline std::int64_t edge(const FixedPoint& a, const FixedPoint& b, std::int64_t px, std::int64_t py) noexcept {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

/// Top-left rule for positively oriented triangles in y-down space: pixels
/// exactly on an edge belong to the triangle only for top and left edges.
/// Two triangles sharing an edge traverse it in opposite directions, so
/// exactly one of them owns it.
inline bool owns_edge(const FixedPoint& a, const FixedPoint& b) noexcept {
  const std::int64_t dy = b.y - a.y;
  const std::int64_t dx = b.x - a.x;
  return dy < 0 || (dy == 0 && dx > 0);
}

/// Visits every pixel center of a width x height grid covered by the
/// triangle. `visit(x, y, lambda)` receives screen-linear barycentrics in the
/// caller's vertex order, computed as e_i / doubled_area from exact integer
/// edge functions. Degenerate (zero-area) triangles visit nothing.
template <class Visit>
void scan_triangle(const std::array<Vec2, 3>& screen, int width, int height, Visit&& visit) {
  std::array<FixedPoint, 3> v;
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(screen[i].x()) || !std::isfinite(screen[i].y())) return;
    v[i] = {snap(screen[i].x()), snap(screen[i].y())};
    if (std::abs(v[i].x) > kMaxFixedCoord || std::abs(v[i].y) > kMaxFixedCoord) return;
  }
  std::array<int, 3> order{0, 1, 2};
  std::int64_t area = edge(v[0], v[1], v[2].x, v[2].y);
  if (area == 0) return;
  if (area < 0) {
    std::swap(v[1], v[2]);
    std::swap(order[1], order[2]);
    area = -area;
  }

  const std::int64_t min_x = std::min({v[0].x, v[1].x, v[2].x});
  const std::int64_t max_x = std::max({v[0].x, v[1].x, v[2].x});
  const std::int64_t min_y = std::min({v[0].y, v[1].y, v[2].y});
  const std::int64_t max_y = std::max({v[0].y, v[1].y, v[2].y});
  // pixel i has its center at i * one + half
  const std::int64_t px0 = std::max<std::int64_t>(0, -floor_div(-(min_x - kSubpixelHalf), kSubpixelOne));
  const std::int64_t px1 = std::min<std::int64_t>(width - 1, floor_div(max_x - kSubpixelHalf, kSubpixelOne));
  const std::int64_t py0 = std::max<std::int64_t>(0, -floor_div(-(min_y - kSubpixelHalf), kSubpixelOne));
  const std::int64_t py1 = std::min<std::int64_t>(height - 1, floor_div(max_y - kSubpixelHalf, kSubpixelOne));
  if (px0 > px1 || py0 > py1) return;

  // edge k is opposite sorted vertex k
  const FixedPoint* a[3] = {&v[1], &v[2], &v[0]};
  const FixedPoint* b[3] = {&v[2], &v[0], &v[1]};
  std::int64_t step_x[3], step_y[3], row[3];
  bool owner[3];
  const std::int64_t sx = px0 * kSubpixelOne + kSubpixelHalf;
  const std::int64_t sy = py0 * kSubpixelOne + kSubpixelHalf;
  for (int k = 0; k < 3; ++k) {
    step_x[k] = -(b[k]->y - a[k]->y) * kSubpixelOne;
    step_y[k] = (b[k]->x - a[k]->x) * kSubpixelOne;
    row[k] = edge(*a[k], *b[k], sx, sy);
    owner[k] = owns_edge(*a[k], *b[k]);
  }

  for (std::int64_t py = py0; py <= py1; ++py) {
    std::int64_t e[3] = {row[0], row[1], row[2]};
    for (std::int64_t px = px0; px <= px1; ++px) {
      const bool inside = (e[0] > 0 || (e[0] == 0 && owner[0])) && (e[1] > 0 || (e[1] == 0 && owner[1])) &&
                          (e[2] > 0 || (e[2] == 0 && owner[2]));
      if (inside) {
        std::array<double, 3> lambda;
        for (int k = 0; k < 3; ++k) lambda[order[k]] = double(e[k]) / double(area);
        visit(int(px), int(py), lambda);
      }
      for (int k = 0; k < 3; ++k) e[k] += step_x[k];
    }
    for (int k = 0; k < 3; ++k) row[k] += step_y[k];
  }
}

}  // namespace raster

/// Z-buffered visibility pass over all faces (no back-face culling). Faces are
/// clipped in homogeneous space against the near plane and a guard band, and
/// depth ties keep the lower face id. For an unclipped triangle with
/// screen-linear barycentrics l_i and vertex depths w_i the stored depth is
/// exactly 1.0 / (l_0 / w_0 + l_1 / w_1 + l_2 / w_2).
GBuffer rasterize_gbuffer(const TriangleMesh& mesh, const Camera& camera);

}  // namespace matbake
