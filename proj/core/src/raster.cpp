#include "matbake/raster.hpp"

#include <Eigen/Geometry>

namespace matbake {
namespace {

// Coverage is computed in a band this many times wider than the viewport so
// snapped coordinates stay small while off-screen vertices need no clipping.
constexpr double kGuardBand = 4.0;

struct ClipVertex {
  Eigen::Vector4d clip;
  std::array<double, 3> bary;
};

// Signed distance to the five clip planes; >= 0 is inside.
double plane_distance(const Eigen::Vector4d& c, int plane) {
  switch (plane) {
    case 0: return c.w() - kNearPlane;
    case 1: return kGuardBand * c.w() - c.x();
    case 2: return kGuardBand * c.w() + c.x();
    case 3: return kGuardBand * c.w() - c.y();
    default: return kGuardBand * c.w() + c.y();
  }
}

bool inside_all(const Eigen::Vector4d& c) {
  for (int p = 0; p < 5; ++p) {
    if (plane_distance(c, p) < 0.0) return false;
  }
  return true;
}

// Sutherland-Hodgman against one plane.
void clip_polygon(std::vector<ClipVertex>& poly, std::vector<ClipVertex>& scratch, int plane) {
  scratch.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ClipVertex& cur = poly[i];
    const ClipVertex& next = poly[(i + 1) % n];
    const double dc = plane_distance(cur.clip, plane);
    const double dn = plane_distance(next.clip, plane);
    if (dc >= 0.0) scratch.push_back(cur);
    if ((dc >= 0.0) != (dn >= 0.0)) {
      const double t = dc / (dc - dn);
      ClipVertex v;
      v.clip = cur.clip + t * (next.clip - cur.clip);
      for (int k = 0; k < 3; ++k) v.bary[k] = cur.bary[k] + t * (next.bary[k] - cur.bary[k]);
      scratch.push_back(v);
    }
  }
  poly.swap(scratch);
}

void draw_triangle(GBuffer& gb, const Camera& camera, std::int32_t face_id, const ClipVertex& v0,
                   const ClipVertex& v1, const ClipVertex& v2) {
  const ClipVertex* verts[3] = {&v0, &v1, &v2};
  std::array<Vec2, 3> screen;
  double w[3];
  for (int i = 0; i < 3; ++i) {
    const ScreenPoint sp = camera.clip_to_screen(verts[i]->clip);
    screen[i] = Vec2(sp.x, sp.y);
    w[i] = verts[i]->clip.w();
  }
  raster::scan_triangle(screen, gb.width, gb.height, [&](int x, int y, const std::array<double, 3>& l) {
    const double s = l[0] / w[0] + l[1] / w[1] + l[2] / w[2];
    const double depth = 1.0 / s;
    const std::size_t idx = gb.index(x, y);
    if (!(depth < gb.depth[idx])) return;
    gb.depth[idx] = depth;
    gb.face[idx] = face_id;
    std::array<double, 3> b{0.0, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      const double mu = (l[j] / w[j]) * depth;
      for (int k = 0; k < 3; ++k) b[k] += mu * verts[j]->bary[k];
    }
    gb.bary[idx] = b;
  });
}

}  // namespace

GBuffer rasterize_gbuffer(const TriangleMesh& mesh, const Camera& camera) {
  GBuffer gb(camera.pose().width, camera.pose().height);
  std::vector<ClipVertex> poly;
  std::vector<ClipVertex> scratch;
  poly.reserve(9);
  scratch.reserve(9);

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    ClipVertex tri[3];
    bool all_inside = true;
    for (int i = 0; i < 3; ++i) {
      tri[i].clip = camera.to_clip(mesh.position(f, i));
      tri[i].bary = {0.0, 0.0, 0.0};
      tri[i].bary[i] = 1.0;
      all_inside = all_inside && inside_all(tri[i].clip);
    }
    const auto face_id = static_cast<std::int32_t>(f);
    if (all_inside) {
      draw_triangle(gb, camera, face_id, tri[0], tri[1], tri[2]);
      continue;
    }
    poly.assign(tri, tri + 3);
    for (int plane = 0; plane < 5 && poly.size() >= 3; ++plane) clip_polygon(poly, scratch, plane);
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      draw_triangle(gb, camera, face_id, poly[0], poly[i], poly[i + 1]);
    }
  }
  return gb;
}

}  // namespace matbake
