#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "matbake/asset_io.hpp"
#include "matbake/camera.hpp"
#include "matbake/image.hpp"
#include "matbake/labels.hpp"
#include "matbake/material.hpp"
#include "matbake/uv_bake.hpp"

namespace fixtures {

using matbake::Vec2;
using matbake::Vec3;

/// Axis-aligned UV rectangle.
struct UvRect {
  Vec2 lo;
  Vec2 hi;
};

/// Appends geometry to a TriangleMesh; positions added through `vertex` are
/// deduplicated on exact coordinates so neighbouring patches share them.
class MeshBuilder {
 public:
  int vertex(const Vec3& p);
  int uv(const Vec2& t);
  void triangle(std::array<int, 3> p, std::array<int, 3> t);

  /// nu x nv grid of quads spanning origin + [-1,1] u_axis + [-1,1] v_axis,
  /// counter-clockwise around u_axis x v_axis, mapped onto `chart`.
  void patch(const Vec3& origin, const Vec3& u_axis, const Vec3& v_axis, int nu, int nv, const UvRect& chart);
  void patch(const Vec3& origin, const Vec3& u_axis, const Vec3& v_axis, int n, const UvRect& chart) {
    patch(origin, u_axis, v_axis, n, n, chart);
  }

  matbake::TriangleMesh& mesh() { return mesh_; }
  matbake::TriangleMesh take() { return std::move(mesh_); }

 private:
  matbake::TriangleMesh mesh_;
  std::vector<std::pair<std::array<double, 3>, int>> lookup_;
};

/// Cell (col, row) of a cols x rows atlas, shrunk by `margin` on each side.
UvRect atlas_cell(int col, int row, int cols, int rows, double margin);

/// Unit cube, one UV chart per side in a 3 x 2 atlas (12 triangles).
matbake::TriangleMesh cube_mesh(int subdiv = 1);

/// OBJ text of cube_mesh(1), with quads left for the loader to split.
std::string cube_obj_text();

/// Cube subdivided n x n per side and pushed onto the unit sphere; six charts.
matbake::TriangleMesh cube_sphere(int n);

/// Flat nx x ny quad grid on z = 0 covering [-1,1]^2, a single chart over
/// [0,1]^2 UV. Quad (i, j) holds faces 2 (j nx + i) and 2 (j nx + i) + 1.
matbake::TriangleMesh grid_mesh(int nx, int ny);

/// Mesh whose atlas cells each belong to one semantic part.
struct PartedMesh {
  matbake::TriangleMesh mesh;
  std::vector<std::uint8_t> face_class;
  std::vector<UvRect> cells;  // full cells, charts sit inside with a margin
  std::vector<std::uint8_t> cell_class;
  int atlas_cols = 0;
  int atlas_rows = 0;
};

/// Seat (fabric), backrest (wood), four legs (metal) and a cushion (leather).
/// Contact faces between parts are omitted. 552 triangles.
PartedMesh chair();

/// Front quad (metal) at x = +0.3, half size 1, and a back quad (wood) at
/// x = -0.3, half size 0.5, both facing +x, one chart each.
PartedMesh occlusion_pair();

/// Albedo with every atlas cell filled by its class's display colour.
matbake::TextureImage paint_cells(const PartedMesh& parts, const matbake::MaterialTable& table, int resolution);

/// Per-texel ground truth from cell geometry; 255 where `table` is unassigned.
matbake::LabelUV cell_ground_truth(const PartedMesh& parts, const matbake::TexelSampleTable& table);

/// Asset built from an in-memory mesh (normalized) and albedo.
matbake::Asset make_asset(const matbake::TriangleMesh& mesh, matbake::TextureImage albedo);

matbake::TextureImage solid_texture(int w, int h, matbake::Rgb color);

/// Up to `max_faces` random triangles inside the ball of radius 0.9.
matbake::TriangleMesh random_mesh(std::mt19937_64& rng, int max_faces);

/// Reference visibility: every triangle tested at every pixel center with
/// directly evaluated edge functions. No clipping; callers keep geometry in
/// front of the near plane and inside the frame's guard band.
struct BruteRaster {
  std::vector<std::int32_t> face;
  std::vector<double> depth;
};
BruteRaster brute_force_raster(const matbake::TriangleMesh& mesh, const matbake::Camera& camera);

/// Reference weighted vote over a stack, straight from the definition.
matbake::LabelUV brute_force_vote(const std::vector<matbake::LabelUV>& stack, const std::vector<bool>& manual,
                                  double alpha);

/// Writes `mesh` as OBJ text (v / vt / f with position/uv pairs).
void write_obj(const matbake::TriangleMesh& mesh, const std::filesystem::path& path);

/// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
