#include "matbake/asset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <Eigen/Geometry>

#include "matbake/error.hpp"
#include "matbake/png_io.hpp"

namespace matbake {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) tokens.push_back(s.substr(start, i - start));
  }
  return tokens;
}

bool parse_double(std::string_view token, double& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(std::string_view token, int& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double wrap_uv(double c) {
  if (c >= 0.0 && c <= 1.0) return c;
  return c - std::floor(c);
}

class ObjParser {
 public:
  explicit ObjParser(std::string source) : source_(std::move(source)) {}

  MeshLoadResult run(std::istream& in) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no_;
      std::string_view line = trim(raw);
      const auto hash = line.find('#');
      if (hash != std::string_view::npos) line = trim(line.substr(0, hash));
      if (line.empty()) continue;
      const auto tokens = split_ws(line);
      const auto& kw = tokens[0];
      if (kw == "v") {
        parse_vec3(tokens, result_.mesh.positions);
      } else if (kw == "vt") {
        parse_uv(tokens);
      } else if (kw == "vn") {
        parse_vec3(tokens, result_.mesh.normals);
      } else if (kw == "f") {
        parse_face(tokens);
      } else if (kw == "mtllib" && tokens.size() >= 2) {
        result_.material_library = std::string(line.substr(line.find(tokens[1])));
      }
      // o, g, s, usemtl, l, p and vendor extensions carry nothing we need
    }
    drop_degenerates();
    return std::move(result_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, source_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  void parse_vec3(const std::vector<std::string_view>& tokens, std::vector<Vec3>& out) {
    if (tokens.size() < 4) fail("expected 3 coordinates");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      if (!parse_double(tokens[i + 1], v[i])) fail("bad number '" + std::string(tokens[i + 1]) + "'");
    }
    out.push_back(v);
  }

  void parse_uv(const std::vector<std::string_view>& tokens) {
    if (tokens.size() < 3) fail("expected 2 texture coordinates");
    Vec2 uv;
    for (int i = 0; i < 2; ++i) {
      if (!parse_double(tokens[i + 1], uv[i])) fail("bad number '" + std::string(tokens[i + 1]) + "'");
      uv[i] = wrap_uv(uv[i]);
    }
    result_.mesh.uvs.push_back(uv);
  }

  int resolve(std::string_view token, std::size_t pool_size, const char* what) const {
    int idx = 0;
    if (!parse_int(token, idx) || idx == 0) fail(std::string("bad ") + what + " index '" + std::string(token) + "'");
    const long resolved = idx > 0 ? long(idx) - 1 : long(pool_size) + idx;
    if (resolved < 0 || resolved >= long(pool_size)) {
      fail(std::string(what) + " index " + std::to_string(idx) + " out of range");
    }
    return static_cast<int>(resolved);
  }

  Corner parse_corner(std::string_view token) {
    Corner c;
    const auto s1 = token.find('/');
    c.position = resolve(token.substr(0, s1), result_.mesh.positions.size(), "position");
    if (s1 == std::string_view::npos) return c;
    const auto rest = token.substr(s1 + 1);
    const auto s2 = rest.find('/');
    const auto uv_tok = rest.substr(0, s2);
    if (!uv_tok.empty()) c.uv = resolve(uv_tok, result_.mesh.uvs.size(), "uv");
    if (s2 != std::string_view::npos && s2 + 1 < rest.size()) {
      c.normal = resolve(rest.substr(s2 + 1), result_.mesh.normals.size(), "normal");
    }
    return c;
  }

  void parse_face(const std::vector<std::string_view>& tokens) {
    if (tokens.size() < 4) fail("face needs at least 3 corners");
    std::vector<Corner> corners;
    corners.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      corners.push_back(parse_corner(tokens[i]));
      if (corners.back().uv == kNoIndex) {
        throw Error(ErrorCode::MissingUVs, source_ + ":" + std::to_string(line_no_) + ": face corner without vt index");
      }
    }
    if (corners.size() > 3) ++result_.triangulated_polygons;
    for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
      result_.mesh.faces.push_back({corners[0], corners[i], corners[i + 1]});
    }
  }

  void drop_degenerates() {
    auto& mesh = result_.mesh;
    if (mesh.positions.empty()) return;
    Vec3 lo = mesh.positions.front();
    Vec3 hi = lo;
    for (const auto& p : mesh.positions) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double extent = (hi - lo).norm();
    const double min_area = 1e-12 * extent * extent;
    std::vector<Face> kept;
    kept.reserve(mesh.faces.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      if (mesh.area(f) > min_area) {
        kept.push_back(mesh.faces[f]);
      } else {
        ++result_.dropped_degenerate;
      }
    }
    mesh.faces = std::move(kept);
  }

  std::string source_;
  std::size_t line_no_ = 0;
  MeshLoadResult result_;
};

}  // namespace

double TriangleMesh::area(std::size_t face) const {
  const Vec3 e1 = position(face, 1) - position(face, 0);
  const Vec3 e2 = position(face, 2) - position(face, 0);
  return 0.5 * e1.cross(e2).norm();
}

Vec3 TriangleMesh::face_normal(std::size_t face) const {
  const Vec3 e1 = position(face, 1) - position(face, 0);
  const Vec3 e2 = position(face, 2) - position(face, 0);
  Vec3 n = e1.cross(e2);
  const double len = n.norm();
  if (len == 0.0) return Vec3::Zero();
  n /= len;
  const auto& corners = faces[face];
  if (corners[0].normal != kNoIndex && corners[1].normal != kNoIndex && corners[2].normal != kNoIndex) {
    const Vec3 shading = normals[corners[0].normal] + normals[corners[1].normal] + normals[corners[2].normal];
    if (shading.dot(n) < 0.0) n = -n;
  }
  return n;
}

void validate_mesh(const TriangleMesh& mesh) {
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (const auto& c : mesh.faces[f]) {
      if (c.position < 0 || std::size_t(c.position) >= mesh.positions.size()) {
        throw Error(ErrorCode::ParseError, "face " + std::to_string(f) + ": position index out of range");
      }
      if (c.uv == kNoIndex) {
        throw Error(ErrorCode::MissingUVs, "face " + std::to_string(f) + " has a corner without UV");
      }
      if (c.uv < 0 || std::size_t(c.uv) >= mesh.uvs.size()) {
        throw Error(ErrorCode::ParseError, "face " + std::to_string(f) + ": uv index out of range");
      }
      if (c.normal != kNoIndex && (c.normal < 0 || std::size_t(c.normal) >= mesh.normals.size())) {
        throw Error(ErrorCode::ParseError, "face " + std::to_string(f) + ": normal index out of range");
      }
    }
  }
}

MeshLoadResult parse_obj(std::istream& in, const std::string& source_name) {
  return ObjParser(source_name).run(in);
}

MeshLoadResult load_mesh(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorCode::FileNotFound, path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_obj(in, path.string());
}

TriangleMesh normalize_mesh(const TriangleMesh& mesh) {
  if (mesh.positions.empty() || mesh.faces.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no geometry");
  Vec3 lo = mesh.positions.front();
  Vec3 hi = lo;
  for (const auto& p : mesh.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 center = 0.5 * (lo + hi);
  double max_norm = 0.0;
  for (const auto& p : mesh.positions) max_norm = std::max(max_norm, (p - center).norm());
  if (!(max_norm > 0.0)) throw Error(ErrorCode::DegenerateExtent, "all vertices coincide");

  TriangleMesh out = mesh;
  const double scale = 1.0 / max_norm;
  for (auto& p : out.positions) p = (p - center) * scale;
  return out;
}

std::filesystem::path find_albedo_in_mtl(const std::filesystem::path& mtl_path) {
  std::ifstream in(mtl_path);
  if (!in) return {};
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = trim(raw);
    if (line.rfind("map_Kd", 0) != 0) continue;
    const auto tokens = split_ws(line);
    if (tokens.size() < 2) continue;
    // options such as `-s 1 1 1` may precede the file name; it is always last
    return mtl_path.parent_path() / std::string(tokens.back());
  }
  return {};
}

Asset load_asset(const std::filesystem::path& mesh_path, const std::filesystem::path& albedo_path) {
  auto loaded = load_mesh(mesh_path);
  Asset asset;
  asset.name = mesh_path.stem().string();
  asset.mesh = normalize_mesh(loaded.mesh);

  std::filesystem::path albedo = albedo_path;
  if (albedo.empty() && !loaded.material_library.empty()) {
    albedo = find_albedo_in_mtl(mesh_path.parent_path() / loaded.material_library);
  }
  if (albedo.empty()) throw Error(ErrorCode::FileNotFound, "no albedo texture given or referenced by " + mesh_path.string());
  asset.albedo = load_texture(albedo);
  return asset;
}

}  // namespace matbake
