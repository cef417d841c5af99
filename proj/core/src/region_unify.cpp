#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "matbake/error.hpp"
#include "matbake/fusion.hpp"

namespace matbake {
namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;  // smallest index is the root, keeps ids deterministic
  }

 private:
  std::vector<std::size_t> parent_;
};

// Exact Euclidean nearest-seed transform (Felzenszwalb & Huttenlocher):
// returns, per cell of a w x h grid, the linear index of the closest seed
// cell, or -1 when the grid has no seed.
std::vector<std::int64_t> nearest_seed(int w, int h, const std::vector<char>& seed) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> seed_row(std::size_t(w) * h, -1);
  for (int x = 0; x < w; ++x) {
    std::int64_t last = -1;
    for (int y = 0; y < h; ++y) {
      if (seed[std::size_t(y) * w + x]) last = y;
      seed_row[std::size_t(y) * w + x] = last;
    }
    std::int64_t next = -1;
    for (int y = h - 1; y >= 0; --y) {
      if (seed[std::size_t(y) * w + x]) next = y;
      auto& best = seed_row[std::size_t(y) * w + x];
      if (next >= 0 && (best < 0 || next - y < y - best)) best = next;
    }
  }

  std::vector<std::int64_t> out(std::size_t(w) * h, -1);
  std::vector<std::int64_t> f(w), v(w);
  std::vector<double> z(std::size_t(w) + 1);
  for (int y = 0; y < h; ++y) {
    for (int q = 0; q < w; ++q) {
      const std::int64_t r = seed_row[std::size_t(y) * w + q];
      f[q] = r < 0 ? kInf : (r - y) * (r - y);
    }
    int k = -1;
    for (std::int64_t q = 0; q < w; ++q) {
      if (f[q] >= kInf) continue;
      if (k < 0) {
        k = 0;
        v[0] = q;
        z[0] = -std::numeric_limits<double>::infinity();
        z[1] = std::numeric_limits<double>::infinity();
        continue;
      }
      double s;
      for (;;) {
        const std::int64_t p = v[k];
        s = double((f[q] + q * q) - (f[p] + p * p)) / double(2 * q - 2 * p);
        if (s <= z[k]) {
          --k;
        } else {
          break;
        }
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) continue;
    int j = 0;
    for (int x = 0; x < w; ++x) {
      while (z[j + 1] < double(x)) ++j;
      const std::int64_t q = v[j];
      out[std::size_t(y) * w + x] = seed_row[std::size_t(y) * w + q] * w + q;
    }
  }
  return out;
}

struct ChartInfo {
  int min_x = std::numeric_limits<int>::max();
  int min_y = std::numeric_limits<int>::max();
  int max_x = -1;
  int max_y = -1;
  std::size_t holes = 0;
  std::size_t observed = 0;
  std::array<std::size_t, kClassCount> label_counts{};
};

std::size_t fill_holes(std::vector<std::uint8_t>& labels, const TexelSampleTable& table, const std::vector<int>& chart_of_face,
                       int chart_count, double dominance) {
  const int res = table.resolution;
  std::vector<ChartInfo> charts(static_cast<std::size_t>(chart_count));
  for (std::size_t t = 0; t < table.texel_count(); ++t) {
    if (!table.assigned(t)) continue;
    auto& c = charts[std::size_t(chart_of_face[std::size_t(table.face[t])])];
    const int x = int(t % std::size_t(res));
    const int y = int(t / std::size_t(res));
    c.min_x = std::min(c.min_x, x);
    c.max_x = std::max(c.max_x, x);
    c.min_y = std::min(c.min_y, y);
    c.max_y = std::max(c.max_y, y);
    if (labels[t] == kBackgroundLabel) {
      ++c.holes;
    } else {
      ++c.observed;
      ++c.label_counts[labels[t]];
    }
  }

  std::size_t filled = 0;
  for (int id = 0; id < chart_count; ++id) {
    const auto& c = charts[std::size_t(id)];
    if (c.holes == 0 || c.observed == 0) continue;
    const auto dominant = std::max_element(c.label_counts.begin(), c.label_counts.end());
    const bool use_dominant = double(*dominant) >= dominance * double(c.observed);
    const auto dominant_label = static_cast<std::uint8_t>(dominant - c.label_counts.begin());

    const int w = c.max_x - c.min_x + 1;
    const int h = c.max_y - c.min_y + 1;
    auto in_chart = [&](int x, int y, std::size_t& t) {
      t = std::size_t(y) * res + x;
      return table.assigned(t) && chart_of_face[std::size_t(table.face[t])] == id;
    };
    std::vector<std::int64_t> nearest;
    if (!use_dominant) {
      std::vector<char> seed(std::size_t(w) * h, 0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          std::size_t t;
          if (in_chart(c.min_x + x, c.min_y + y, t) && labels[t] != kBackgroundLabel) seed[std::size_t(y) * w + x] = 1;
        }
      }
      nearest = nearest_seed(w, h, seed);
    }
    // Reads below only touch seed texels, which this loop never writes.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        std::size_t t;
        if (!in_chart(c.min_x + x, c.min_y + y, t) || labels[t] != kBackgroundLabel) continue;
        if (use_dominant) {
          labels[t] = dominant_label;
        } else {
          const std::int64_t s = nearest[std::size_t(y) * w + x];
          const int sx = int(s % w) + c.min_x;
          const int sy = int(s / w) + c.min_y;
          labels[t] = labels[std::size_t(sy) * res + sx];
        }
        ++filled;
      }
    }
  }
  return filled;
}

struct Adjacency {
  std::size_t face;
  double length;
};

std::vector<std::vector<Adjacency>> face_adjacency(const TriangleMesh& mesh, const std::vector<char>& active) {
  std::map<std::pair<int, int>, std::vector<std::size_t>> edges;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!active[f]) continue;
    for (int i = 0; i < 3; ++i) {
      int a = mesh.faces[f][i].position;
      int b = mesh.faces[f][(i + 1) % 3].position;
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      edges[{a, b}].push_back(f);
    }
  }
  std::vector<std::vector<Adjacency>> adj(mesh.faces.size());
  for (const auto& [key, faces] : edges) {
    const double length = (mesh.positions[std::size_t(key.first)] - mesh.positions[std::size_t(key.second)]).norm();
    for (std::size_t i = 0; i < faces.size(); ++i) {
      for (std::size_t j = 0; j < faces.size(); ++j) {
        if (i != j && faces[i] != faces[j]) adj[faces[i]].push_back({faces[j], length});
      }
    }
  }
  return adj;
}

}  // namespace

std::vector<int> uv_charts(const TriangleMesh& mesh) {
  std::map<std::pair<double, double>, int> uv_key;
  auto key_of = [&](const Vec2& uv) {
    const auto [it, inserted] = uv_key.try_emplace({uv.x(), uv.y()}, int(uv_key.size()));
    return it->second;
  };
  DisjointSet sets(mesh.faces.size());
  std::map<std::pair<int, int>, std::size_t> first_face;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    int k[3];
    for (int i = 0; i < 3; ++i) k[i] = key_of(mesh.uv(f, i));
    for (int i = 0; i < 3; ++i) {
      int a = k[i];
      int b = k[(i + 1) % 3];
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      const auto [it, inserted] = first_face.try_emplace({a, b}, f);
      if (!inserted) sets.unite(it->second, f);
    }
  }
  std::vector<int> chart(mesh.faces.size(), -1);
  std::map<std::size_t, int> root_id;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto [it, inserted] = root_id.try_emplace(sets.find(f), int(root_id.size()));
    chart[f] = it->second;
  }
  return chart;
}

LabelUV region_unify(const LabelUV& fused, const TexelSampleTable& table, const TriangleMesh& mesh,
                     const FusionConfig& cfg, UnifyStats* stats) {
  cfg.validate();
  if (fused.resolution != table.resolution || fused.labels.size() != table.texel_count()) {
    throw Error(ErrorCode::ShapeMismatch, "fused labels and texel table differ in resolution");
  }
  UnifyStats local;
  LabelUV out = fused;
  out.view_index = LabelUV::kFused;
  const std::size_t face_count = mesh.faces.size();

  // 1. hole fill within UV charts
  const auto chart_of_face = uv_charts(mesh);
  const int chart_count = chart_of_face.empty() ? 0 : *std::max_element(chart_of_face.begin(), chart_of_face.end()) + 1;
  local.holes_filled = fill_holes(out.labels, table, chart_of_face, chart_count, cfg.unify_dominance);

  // 2. per-face mode
  std::vector<std::array<std::size_t, kClassCount>> counts(face_count);
  std::vector<std::size_t> face_texels(face_count, 0);
  for (std::size_t t = 0; t < table.texel_count(); ++t) {
    if (!table.assigned(t)) continue;
    const auto f = std::size_t(table.face[t]);
    ++face_texels[f];
    if (out.labels[t] != kBackgroundLabel) ++counts[f][out.labels[t]];
  }
  std::vector<std::uint8_t> face_label(face_count, kBackgroundLabel);
  std::vector<char> active(face_count, 0);
  for (std::size_t f = 0; f < face_count; ++f) {
    active[f] = face_texels[f] > 0;
    std::size_t best = 0;
    for (std::uint8_t c = 0; c < kClassCount; ++c) {
      if (counts[f][c] > best) {
        best = counts[f][c];
        face_label[f] = c;
      }
    }
  }
  const std::vector<std::uint8_t> initial_label = face_label;

  // 3. region absorption on the 3D edge graph
  const auto adj = face_adjacency(mesh, active);
  const double threshold = cfg.unify_min_region * double(table.assigned_count);
  for (;;) {
    DisjointSet sets(face_count);
    for (std::size_t f = 0; f < face_count; ++f) {
      if (!active[f]) continue;
      for (const auto& a : adj[f]) {
        if (face_label[a.face] == face_label[f]) sets.unite(f, a.face);
      }
    }
    std::vector<std::size_t> region(face_count);
    std::vector<std::size_t> region_size(face_count, 0);
    std::vector<std::vector<std::size_t>> members(face_count);
    for (std::size_t f = 0; f < face_count; ++f) {
      if (!active[f]) continue;
      region[f] = sets.find(f);
      region_size[region[f]] += face_texels[f];
      members[region[f]].push_back(f);
    }

    // (unlabeled first, then by size, then by lowest member face)
    std::vector<std::size_t> candidates;
    for (std::size_t r = 0; r < face_count; ++r) {
      if (members[r].empty()) continue;
      const bool unlabeled = face_label[r] == kBackgroundLabel;
      if (!unlabeled && double(region_size[r]) >= threshold) continue;
      const bool has_target = std::any_of(members[r].begin(), members[r].end(), [&](std::size_t f) {
        return std::any_of(adj[f].begin(), adj[f].end(), [&](const Adjacency& a) {
          return face_label[a.face] != kBackgroundLabel && face_label[a.face] != face_label[r];
        });
      });
      if (has_target) candidates.push_back(r);
    }
    if (candidates.empty()) break;
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      const bool la = face_label[a] != kBackgroundLabel;
      const bool lb = face_label[b] != kBackgroundLabel;
      if (la != lb) return !la;
      if (region_size[a] != region_size[b]) return region_size[a] < region_size[b];
      return a < b;
    });

    std::vector<char> dirty(face_count, 0);
    bool changed = false;
    for (const std::size_t r : candidates) {
      if (dirty[r]) continue;
      const std::uint8_t own = face_label[members[r].front()];
      std::array<double, kClassCount> boundary{};
      for (const std::size_t f : members[r]) {
        for (const auto& a : adj[f]) {
          const std::uint8_t l = face_label[a.face];
          if (l != kBackgroundLabel && l != own) boundary[l] += a.length;
        }
      }
      std::uint8_t target = kBackgroundLabel;
      double best = 0.0;
      for (std::uint8_t c = 0; c < kClassCount; ++c) {
        if (boundary[c] > best) {
          best = boundary[c];
          target = c;
        }
      }
      if (target == kBackgroundLabel) continue;
      for (const std::size_t f : members[r]) {
        face_label[f] = target;
        for (const auto& a : adj[f]) dirty[region[a.face]] = 1;
      }
      dirty[r] = 1;
      changed = true;
      ++local.regions_absorbed;
    }
    if (!changed) break;
  }

  // 4. rewrite texels of relabeled faces
  for (std::size_t t = 0; t < table.texel_count(); ++t) {
    if (!table.assigned(t)) continue;
    const auto f = std::size_t(table.face[t]);
    if (face_label[f] != initial_label[f] && out.labels[t] != face_label[f]) {
      out.labels[t] = face_label[f];
      ++local.texels_relabeled;
    }
  }
  if (stats != nullptr) *stats = local;
  return out;
}

}  // namespace matbake
