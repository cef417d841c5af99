#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fixtures {

using namespace matbake;

int MeshBuilder::vertex(const Vec3& p) {
  const std::array<double, 3> key{p.x(), p.y(), p.z()};
  for (const auto& [k, id] : lookup_) {
    if (k == key) return id;
  }
  const int id = static_cast<int>(mesh_.positions.size());
  mesh_.positions.push_back(p);
  lookup_.emplace_back(key, id);
  return id;
}

int MeshBuilder::uv(const Vec2& t) {
  mesh_.uvs.push_back(t);
  return static_cast<int>(mesh_.uvs.size()) - 1;
}

void MeshBuilder::triangle(std::array<int, 3> p, std::array<int, 3> t) {
  Face f;
  for (int i = 0; i < 3; ++i) f[i] = Corner{p[i], t[i], kNoIndex};
  mesh_.faces.push_back(f);
}

void MeshBuilder::patch(const Vec3& origin, const Vec3& u_axis, const Vec3& v_axis, int nu, int nv,
                        const UvRect& chart) {
  const int stride = nu + 1;
  std::vector<int> pid(stride * (nv + 1));
  std::vector<int> tid(stride * (nv + 1));
  for (int j = 0; j <= nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      const double s = -1.0 + 2.0 * i / nu;
      const double t = -1.0 + 2.0 * j / nv;
      Vec3 p;
      for (int k = 0; k < 3; ++k) p[k] = origin[k] + s * u_axis[k] + t * v_axis[k];
      pid[j * stride + i] = vertex(p);
      const Vec2 uvp(chart.lo.x() + (chart.hi.x() - chart.lo.x()) * i / nu,
                     chart.lo.y() + (chart.hi.y() - chart.lo.y()) * j / nv);
      tid[j * stride + i] = uv(uvp);
    }
  }
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const int a = j * stride + i;
      const int b = a + 1;
      const int c = a + stride + 1;
      const int d = a + stride;
      triangle({pid[a], pid[b], pid[c]}, {tid[a], tid[b], tid[c]});
      triangle({pid[a], pid[c], pid[d]}, {tid[a], tid[c], tid[d]});
    }
  }
}

UvRect atlas_cell(int col, int row, int cols, int rows, double margin) {
  const double w = 1.0 / cols;
  const double h = 1.0 / rows;
  return {Vec2(col * w + margin, row * h + margin), Vec2((col + 1) * w - margin, (row + 1) * h - margin)};
}

namespace {

struct BoxSide {
  Vec3 normal;
  Vec3 u;
  Vec3 v;
};

// u x v == normal for every side
const std::array<BoxSide, 6> kSides{{
    {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},
    {Vec3(-1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)},
    {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 0, 0)},
    {Vec3(0, -1, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)},
    {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)},
    {Vec3(0, 0, -1), Vec3(0, 1, 0), Vec3(1, 0, 0)},
}};

constexpr unsigned kSkipBack = 1u << 2;  // +y
constexpr unsigned kSkipTop = 1u << 4;
constexpr unsigned kSkipBottom = 1u << 5;

struct Part {
  Vec3 center;
  Vec3 half;
  int subdiv;
  std::uint8_t cls;
  unsigned skip;  // bit s drops side s
};

void add_parts(PartedMesh& out, const std::vector<Part>& parts, double margin) {
  int cells = 0;
  for (const auto& p : parts) {
    for (int s = 0; s < 6; ++s) cells += (p.skip >> s & 1u) ? 0 : 1;
  }
  out.atlas_cols = static_cast<int>(std::ceil(std::sqrt(double(cells))));
  out.atlas_rows = (cells + out.atlas_cols - 1) / out.atlas_cols;
  int cell = 0;
  for (const auto& part : parts) {
    // a fresh builder per part keeps parts from sharing vertices
    MeshBuilder b;
    for (int s = 0; s < 6; ++s) {
      if (part.skip >> s & 1u) continue;
      const auto& side = kSides[s];
      const int col = cell % out.atlas_cols;
      const int row = cell / out.atlas_cols;
      ++cell;
      const UvRect chart = atlas_cell(col, row, out.atlas_cols, out.atlas_rows, margin);
      out.cells.push_back(atlas_cell(col, row, out.atlas_cols, out.atlas_rows, 0.0));
      out.cell_class.push_back(part.cls);
      b.patch(part.center + side.normal.cwiseProduct(part.half), side.u.cwiseProduct(part.half),
              side.v.cwiseProduct(part.half), part.subdiv, chart);
    }
    TriangleMesh m = b.take();
    const int p0 = static_cast<int>(out.mesh.positions.size());
    const int t0 = static_cast<int>(out.mesh.uvs.size());
    out.mesh.positions.insert(out.mesh.positions.end(), m.positions.begin(), m.positions.end());
    out.mesh.uvs.insert(out.mesh.uvs.end(), m.uvs.begin(), m.uvs.end());
    for (auto f : m.faces) {
      for (auto& c : f) {
        c.position += p0;
        c.uv += t0;
      }
      out.mesh.faces.push_back(f);
      out.face_class.push_back(part.cls);
    }
  }
}

}  // namespace

TriangleMesh cube_mesh(int subdiv) {
  MeshBuilder b;
  for (int s = 0; s < 6; ++s) {
    const auto& side = kSides[s];
    b.patch(side.normal * 0.5, side.u * 0.5, side.v * 0.5, subdiv, atlas_cell(s % 3, s / 3, 3, 2, 0.02));
  }
  return b.take();
}

std::string cube_obj_text() {
  const TriangleMesh m = cube_mesh(1);
  std::ostringstream out;
  out.precision(17);
  out << "# unit cube\no cube\n";
  for (const auto& p : m.positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& t : m.uvs) out << "vt " << t.x() << ' ' << t.y() << '\n';
  // faces come in pairs (a b c) (a c d): emit each pair as one quad
  for (std::size_t f = 0; f + 1 < m.faces.size(); f += 2) {
    const auto& x = m.faces[f];
    const auto& y = m.faces[f + 1];
    const Corner quad[4] = {x[0], x[1], x[2], y[2]};
    out << 'f';
    for (const auto& c : quad) out << ' ' << c.position + 1 << '/' << c.uv + 1;
    out << '\n';
  }
  return out.str();
}

TriangleMesh cube_sphere(int n) {
  MeshBuilder b;
  for (int s = 0; s < 6; ++s) {
    const auto& side = kSides[s];
    b.patch(side.normal, side.u, side.v, n, atlas_cell(s % 3, s / 3, 3, 2, 0.01));
  }
  TriangleMesh m = b.take();
  for (auto& p : m.positions) p.normalize();
  return m;
}

TriangleMesh grid_mesh(int nx, int ny) {
  MeshBuilder b;
  b.patch(Vec3::Zero(), Vec3(1, 0, 0), Vec3(0, 1, 0), nx, ny, {Vec2(0, 0), Vec2(1, 1)});
  return b.take();
}

PartedMesh chair() {
  using namespace matbake::material;
  PartedMesh out;
  std::vector<Part> parts{
      // seat top is covered by the cushion and the backrest
      {Vec3(0, 0, 0.45), Vec3(0.5, 0.5, 0.05), 4, kFabric, kSkipTop},
      {Vec3(0, 0.45, 0.95), Vec3(0.5, 0.05, 0.45), 4, kWood, kSkipBottom},
      {Vec3(0.42, 0.42, 0.2), Vec3(0.05, 0.05, 0.2), 2, kMetal, kSkipTop},
      {Vec3(-0.42, 0.42, 0.2), Vec3(0.05, 0.05, 0.2), 2, kMetal, kSkipTop},
      {Vec3(0.42, -0.42, 0.2), Vec3(0.05, 0.05, 0.2), 2, kMetal, kSkipTop},
      {Vec3(-0.42, -0.42, 0.2), Vec3(0.05, 0.05, 0.2), 2, kMetal, kSkipTop},
      {Vec3(0, -0.05, 0.53), Vec3(0.5, 0.45, 0.03), 3, kLeather, kSkipBottom | kSkipBack},
  };
  add_parts(out, parts, 0.01);
  return out;
}

PartedMesh occlusion_pair() {
  using namespace matbake::material;
  PartedMesh out;
  out.atlas_cols = 2;
  out.atlas_rows = 1;
  const struct {
    double x;
    double half;
    std::uint8_t cls;
  } quads[2] = {{0.3, 1.0, kMetal}, {-0.3, 0.5, kWood}};
  for (int q = 0; q < 2; ++q) {
    MeshBuilder b;
    b.patch(Vec3(quads[q].x, 0, 0), Vec3(0, quads[q].half, 0), Vec3(0, 0, quads[q].half), 4,
            atlas_cell(q, 0, 2, 1, 0.02));
    TriangleMesh m = b.take();
    const int p0 = static_cast<int>(out.mesh.positions.size());
    const int t0 = static_cast<int>(out.mesh.uvs.size());
    out.mesh.positions.insert(out.mesh.positions.end(), m.positions.begin(), m.positions.end());
    out.mesh.uvs.insert(out.mesh.uvs.end(), m.uvs.begin(), m.uvs.end());
    for (auto f : m.faces) {
      for (auto& c : f) {
        c.position += p0;
        c.uv += t0;
      }
      out.mesh.faces.push_back(f);
      out.face_class.push_back(quads[q].cls);
    }
    out.cells.push_back(atlas_cell(q, 0, 2, 1, 0.0));
    out.cell_class.push_back(quads[q].cls);
  }
  return out;
}

namespace {

int cell_at(const PartedMesh& parts, double u, double v) {
  for (std::size_t c = 0; c < parts.cells.size(); ++c) {
    const auto& r = parts.cells[c];
    if (u >= r.lo.x() && u < r.hi.x() && v >= r.lo.y() && v < r.hi.y()) return static_cast<int>(c);
  }
  return -1;
}

}  // namespace

TextureImage paint_cells(const PartedMesh& parts, const MaterialTable& table, int resolution) {
  TextureImage img(resolution, resolution);
  for (int y = 0; y < resolution; ++y) {
    for (int x = 0; x < resolution; ++x) {
      const double u = (x + 0.5) / resolution;
      const double v = 1.0 - (y + 0.5) / resolution;
      const int c = cell_at(parts, u, v);
      Rgb color{255, 255, 255};
      if (c >= 0) color = table.classes[parts.cell_class[c]].display_color;
      img.set(x, y, color[0], color[1], color[2]);
    }
  }
  return img;
}

LabelUV cell_ground_truth(const PartedMesh& parts, const TexelSampleTable& table) {
  const int r = table.resolution;
  LabelUV gt(r, LabelUV::kFused);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const std::size_t t = std::size_t(y) * r + x;
      if (!table.assigned(t)) continue;
      const int c = cell_at(parts, (x + 0.5) / r, 1.0 - (y + 0.5) / r);
      if (c >= 0) gt.labels[t] = parts.cell_class[c];
    }
  }
  return gt;
}

Asset make_asset(const TriangleMesh& mesh, TextureImage albedo) {
  Asset a;
  a.mesh = normalize_mesh(mesh);
  a.albedo = std::move(albedo);
  a.name = "fixture";
  return a;
}

TextureImage solid_texture(int w, int h, Rgb color) {
  TextureImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.set(x, y, color[0], color[1], color[2]);
  }
  return img;
}

TriangleMesh random_mesh(std::mt19937_64& rng, int max_faces) {
  std::uniform_int_distribution<int> count(1, max_faces);
  std::uniform_real_distribution<double> coord(-0.9, 0.9);
  TriangleMesh m;
  m.uvs.push_back(Vec2(0.5, 0.5));
  const int n = count(rng);
  for (int f = 0; f < n; ++f) {
    Face face;
    for (int i = 0; i < 3; ++i) {
      Vec3 p;
      do {
        p = Vec3(coord(rng), coord(rng), coord(rng));
      } while (p.norm() > 0.9);
      face[i] = Corner{static_cast<int>(m.positions.size()), 0, kNoIndex};
      m.positions.push_back(p);
    }
    m.faces.push_back(face);
  }
  return m;
}

BruteRaster brute_force_raster(const TriangleMesh& mesh, const Camera& camera) {
  const int w = camera.pose().width;
  const int h = camera.pose().height;
  BruteRaster out;
  out.face.assign(std::size_t(w) * h, -1);
  out.depth.assign(std::size_t(w) * h, std::numeric_limits<double>::infinity());

  struct Snapped {
    long long x[3], y[3];
    double w[3];
  };
  std::vector<Snapped> tris(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    for (int i = 0; i < 3; ++i) {
      const auto clip = camera.to_clip(mesh.position(f, i));
      const auto sp = camera.clip_to_screen(clip);
      tris[f].x[i] = std::llround(sp.x * 256.0);
      tris[f].y[i] = std::llround(sp.y * 256.0);
      tris[f].w[i] = clip.w();
    }
  }
  auto cross = [](long long ax, long long ay, long long bx, long long by, long long px, long long py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  };
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const long long cx = px * 256LL + 128;
      const long long cy = py * 256LL + 128;
      for (std::size_t f = 0; f < tris.size(); ++f) {
        const auto& t = tris[f];
        const long long area = cross(t.x[0], t.y[0], t.x[1], t.y[1], t.x[2], t.y[2]);
        if (area == 0) continue;
        // weight of vertex i is the edge function of the opposite edge,
        // oriented so that all three are positive inside
        const long long sign = area > 0 ? 1 : -1;
        bool inside = true;
        double lambda[3];
        for (int i = 0; i < 3 && inside; ++i) {
          int a = (i + 1) % 3;
          int b = (i + 2) % 3;
          if (sign < 0) std::swap(a, b);
          const long long e = cross(t.x[a], t.y[a], t.x[b], t.y[b], cx, cy);
          const long long dx = t.x[b] - t.x[a];
          const long long dy = t.y[b] - t.y[a];
          const bool top_left = dy < 0 || (dy == 0 && dx > 0);
          inside = e > 0 || (e == 0 && top_left);
          lambda[i] = double(e) / double(area * sign);
        }
        if (!inside) continue;
        const double depth = 1.0 / (lambda[0] / t.w[0] + lambda[1] / t.w[1] + lambda[2] / t.w[2]);
        const std::size_t idx = std::size_t(py) * w + px;
        if (depth < out.depth[idx]) {
          out.depth[idx] = depth;
          out.face[idx] = static_cast<std::int32_t>(f);
        }
      }
    }
  }
  return out;
}

LabelUV brute_force_vote(const std::vector<LabelUV>& stack, const std::vector<bool>& manual, double alpha) {
  const int r = stack.front().resolution;
  LabelUV out(r, LabelUV::kFused);
  for (std::size_t t = 0; t < out.labels.size(); ++t) {
    std::array<double, kClassCount> w{};
    for (std::size_t v = 0; v < stack.size(); ++v) {
      const auto l = stack[v].labels[t];
      if (l == kBackgroundLabel) continue;
      w[l] += manual[v] ? alpha : 1.0;
    }
    double best = 0.0;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      if (w[c] > best) {
        best = w[c];
        out.labels[t] = static_cast<std::uint8_t>(c);
      }
    }
  }
  return out;
}

void write_obj(const matbake::TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  char line[160];
  for (const auto& p : mesh.positions) {
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << line;
  }
  for (const auto& t : mesh.uvs) {
    std::snprintf(line, sizeof line, "vt %.17g %.17g\n", t.x(), t.y());
    out << line;
  }
  for (const auto& f : mesh.faces) {
    out << "f";
    for (const auto& c : f) out << ' ' << c.position + 1 << '/' << c.uv + 1;
    out << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("matbake_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace fixtures
