#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "matbake/image.hpp"

namespace matbake {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr int kNoIndex = -1;

/// One triangle corner: indices into the mesh's position / uv / normal pools.
struct Corner {
  int position = kNoIndex;
  int uv = kNoIndex;
  int normal = kNoIndex;

  friend bool operator==(const Corner&, const Corner&) = default;
};

using Face = std::array<Corner, 3>;

/// Indexed triangle mesh with per-corner UVs. Every corner carries a UV index;
/// normals are optional.
struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Vec2> uvs;
  std::vector<Vec3> normals;
  std::vector<Face> faces;

  bool empty() const noexcept { return faces.empty(); }

  const Vec3& position(std::size_t face, int corner) const { return positions[faces[face][corner].position]; }
  const Vec2& uv(std::size_t face, int corner) const { return uvs[faces[face][corner].uv]; }

  double area(std::size_t face) const;

  /// Unit geometric normal from the counter-clockwise winding. When the face
  /// carries per-corner normals the result is flipped to agree with their sum.
  Vec3 face_normal(std::size_t face) const;
};

/// Throws ParseError when an index is out of range or a corner lacks a UV.
void validate_mesh(const TriangleMesh& mesh);

struct MeshLoadResult {
  TriangleMesh mesh;
  std::size_t dropped_degenerate = 0;
  std::size_t triangulated_polygons = 0;
  std::string material_library;  // `mtllib` argument, if any
};

/// Wavefront OBJ reader (v / vt / vn / f). Polygons are fan-triangulated from
/// their first corner, negative (relative) indices are resolved, UVs outside
/// [0,1] are wrapped with fract(), and zero-area triangles are dropped.
MeshLoadResult parse_obj(std::istream& in, const std::string& source_name = "<stream>");
MeshLoadResult load_mesh(const std::filesystem::path& path);

/// Centers the bounding box on the origin and scales uniformly so that the
/// farthest vertex sits at distance exactly 1. UVs are untouched.
TriangleMesh normalize_mesh(const TriangleMesh& mesh);

/// Resolves `map_Kd` from an OBJ material library; empty path when absent.
std::filesystem::path find_albedo_in_mtl(const std::filesystem::path& mtl_path);

struct Asset {
  TriangleMesh mesh;
  TextureImage albedo;
  std::string name;
};

/// Loads mesh + albedo and normalizes the mesh. When `albedo_path` is empty the
/// OBJ's material library is consulted for a diffuse map.
Asset load_asset(const std::filesystem::path& mesh_path, const std::filesystem::path& albedo_path = {});

}  // namespace matbake
