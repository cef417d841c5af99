#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "fixtures.hpp"
#include "matbake/camera.hpp"
#include "matbake/error.hpp"
#include "matbake/raster.hpp"
#include "matbake/render.hpp"
#include "matbake/schedule.hpp"

using namespace matbake;

TEST_CASE("SplitMix64 reference outputs") {
  // published first outputs for seed 0
  SplitMix64 g(0);
  CHECK(g.next() == 0xE220A8397B1DCDAFull);
  CHECK(g.next() == 0x6E789E6AA1B965F4ull);
  CHECK(g.next() == 0x06C45D188009454Full);
}

TEST_CASE("schedule layout") {
  const auto s = build_schedule(42);
  REQUIRE(s.size() == 41);
  const double manual[5][2] = {{90, 0}, {15, 0}, {15, 90}, {15, 180}, {15, 270}};
  for (int i = 0; i < 5; ++i) {
    CHECK(s.poses[i].manual);
    CHECK(s.poses[i].elevation == manual[i][0]);
    CHECK(s.poses[i].azimuth == manual[i][1]);
  }
  std::map<double, int> azimuths;
  for (std::size_t i = 5; i < s.size(); ++i) {
    const auto& p = s.poses[i];
    CHECK_FALSE(p.manual);
    ++azimuths[p.azimuth];
    CHECK(p.radius == 2.8);
    CHECK(p.fov_y == 40.0);
    CHECK(p.width == 1024);
  }
  REQUIRE(azimuths.size() == 12);
  for (int k = 0; k < 12; ++k) CHECK(azimuths[30.0 * k] == 3);

  for (int k = 0; k < 12; ++k) {
    const auto& zero = s.poses[5 + 3 * k];
    const auto& up = s.poses[6 + 3 * k];
    const auto& down = s.poses[7 + 3 * k];
    CHECK(zero.elevation == 0.0);
    CHECK(up.elevation > 0.0);
    CHECK(up.elevation < 30.0);
    CHECK(down.elevation < 0.0);
    CHECK(down.elevation > -30.0);
  }
}

TEST_CASE("schedule draws from SplitMix64 in pose order") {
  const std::uint64_t seed = 0x1234;
  SplitMix64 g(seed);
  const auto s = build_schedule(seed);
  for (int k = 0; k < 12; ++k) {
    const double up = 30.0 * (double(g.next() >> 11) * 0x1.0p-53);
    const double down = -30.0 * (double(g.next() >> 11) * 0x1.0p-53);
    CHECK(s.poses[6 + 3 * k].elevation == up);
    CHECK(s.poses[7 + 3 * k].elevation == down);
  }
}

TEST_CASE("schedule is reproducible and seed dependent") {
  CHECK(build_schedule(7).poses == build_schedule(7).poses);
  CHECK(build_schedule(7).poses != build_schedule(8).poses);
}

TEST_CASE("pose validation") {
  CameraPose p;
  CHECK_NOTHROW(validate_pose(p));
  p.elevation = 91;
  CHECK_THROWS_AS(validate_pose(p), Error);
  p = {};
  p.azimuth = 360;
  CHECK_THROWS_AS(validate_pose(p), Error);
  p = {};
  p.radius = 1.0;
  CHECK_THROWS_AS(validate_pose(p), Error);
  p = {};
  p.width = 0;
  CHECK_THROWS_AS(validate_pose(p), Error);
}

TEST_CASE("origin projects to the image center for any pose") {
  const auto s = build_schedule(3);
  for (const auto& pose : s.poses) {
    const Camera cam(pose);
    const auto sp = cam.project(Vec3::Zero());
    REQUIRE(sp);
    CHECK(std::abs(sp->x - pose.width / 2.0) <= 0.5);
    CHECK(std::abs(sp->y - pose.height / 2.0) <= 0.5);
    CHECK(sp->depth == doctest::Approx(pose.radius));
  }
}

TEST_CASE("pinhole projection of (0,0,1) from (elev 0, azim 0, r 3)") {
  CameraPose pose;
  pose.radius = 3.0;
  pose.width = pose.height = 512;
  const Camera cam(pose);
  const double f = 1.0 / std::tan(20.0 * M_PI / 180.0);
  const auto sp = cam.project(Vec3(0, 0, 1));
  REQUIRE(sp);
  CHECK(sp->x == doctest::Approx(256.0));
  // ndc offset f / 3, half the height per ndc unit, upward
  CHECK(256.0 - sp->y == doctest::Approx(f / 3.0 * 256.0));
  CHECK(sp->depth == doctest::Approx(3.0));

  CHECK_FALSE(cam.project(Vec3(4, 0, 0)));
  CHECK(cam.eye().isApprox(Vec3(3, 0, 0)));
}

TEST_CASE("camera orientation conventions") {
  CameraPose side;
  side.azimuth = 90;  // camera on +Y looking back at the origin
  const Camera cam(side);
  CHECK(cam.eye().isApprox(Vec3(0, 2.8, 0)));
  // +Z is up on screen, and +X appears on the right when looking along -Y
  CHECK(cam.project(Vec3(0, 0, 0.5))->y < side.height / 2.0);
  CHECK(cam.project(Vec3(0.5, 0, 0))->x < side.width / 2.0);

  CameraPose top;
  top.elevation = 90;
  const Camera tc(top);
  CHECK(tc.eye().isApprox(Vec3(0, 0, 2.8), 1e-12));
  // at the pole the up vector is -Y: points toward -Y appear higher on screen
  const auto a = tc.project(Vec3(0, -0.5, 0));
  const auto b = tc.project(Vec3(0, 0.5, 0));
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->y < b->y);
  CHECK(std::isfinite(a->x));
}

TEST_CASE("pixel footprint") {
  CameraPose pose;
  pose.width = pose.height = 100;
  const Camera cam(pose);
  CHECK(cam.pixel_footprint(2.0) == doctest::Approx(2.0 * 2.0 * std::tan(20.0 * M_PI / 180.0) / 100.0));
}

TEST_CASE("top-left rule: a jittered triangulation of the frame covers every pixel exactly once") {
  std::mt19937_64 rng(11);
  const int w = 97;
  const int h = 61;
  const int n = 7;
  // vertices on a 1/256 pixel lattice, some exactly on pixel centers
  std::uniform_int_distribution<int> jitter(-200, 200);
  std::bernoulli_distribution on_center(0.2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> grid((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        double x = double(i) * w / n;
        double y = double(j) * h / n;
        if (i > 0 && i < n) x = on_center(rng) ? std::floor(x) + 0.5 : std::round(x * 256 + jitter(rng)) / 256.0;
        if (j > 0 && j < n) y = on_center(rng) ? std::floor(y) + 0.5 : std::round(y * 256 + jitter(rng)) / 256.0;
        grid[j * (n + 1) + i] = Vec2(x, y);
      }
    }
    std::vector<int> hits(std::size_t(w) * h, 0);
    std::bernoulli_distribution flip(0.5);
    std::bernoulli_distribution diag(0.5);
    auto emit = [&](Vec2 a, Vec2 b, Vec2 c) {
      if (flip(rng)) std::swap(b, c);
      raster::scan_triangle({a, b, c}, w, h, [&](int x, int y, const std::array<double, 3>& l) {
        ++hits[std::size_t(y) * w + x];
        CHECK(std::abs(l[0] + l[1] + l[2] - 1.0) < 1e-12);
      });
    };
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec2 a = grid[j * (n + 1) + i];
        const Vec2 b = grid[j * (n + 1) + i + 1];
        const Vec2 c = grid[(j + 1) * (n + 1) + i + 1];
        const Vec2 d = grid[(j + 1) * (n + 1) + i];
        if (diag(rng)) {
          emit(a, b, c);
          emit(a, c, d);
        } else {
          emit(a, b, d);
          emit(b, c, d);
        }
      }
    }
    CHECK(std::all_of(hits.begin(), hits.end(), [](int k) { return k == 1; }));
  }
}

TEST_CASE("empty mesh renders background only") {
  Asset a;
  a.albedo = fixtures::solid_texture(4, 4, {1, 2, 3});
  CameraPose pose;
  pose.width = pose.height = 32;
  const auto view = render_view(a, pose);
  for (std::size_t i = 0; i < view.gbuffer.face.size(); ++i) {
    CHECK(view.gbuffer.face[i] == GBuffer::kNone);
    CHECK(std::isinf(view.gbuffer.depth[i]));
    CHECK(view.color.pixels[i * 4 + 3] == 0);
  }
}

TEST_CASE("one triangle covering the frustum cross-section") {
  TriangleMesh m;
  // plane x = 0 seen from +X; the triangle extends far past the frame
  m.positions = {Vec3(0, -50, -50), Vec3(0, 50, -50), Vec3(0, 0, 50)};
  m.uvs = {Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 1)};
  m.faces.push_back({Corner{0, 0}, Corner{1, 1}, Corner{2, 2}});
  CameraPose pose;
  pose.width = pose.height = 64;
  const auto gb = rasterize_gbuffer(m, Camera(pose));
  for (std::size_t i = 0; i < gb.face.size(); ++i) {
    REQUIRE(gb.face[i] == 0);
    const auto& b = gb.bary[i];
    CHECK(std::abs(b[0] + b[1] + b[2] - 1.0) < 1e-6);
    CHECK(std::min({b[0], b[1], b[2]}) >= -1e-6);
  }
}

TEST_CASE("near-plane clipping keeps geometry behind the camera out") {
  TriangleMesh m;
  // floor triangle that passes under and behind the camera
  m.positions = {Vec3(-20, -20, -0.5), Vec3(20, -20, -0.5), Vec3(0, 20, -0.5)};
  m.uvs = {Vec2(0, 0)};
  m.faces.push_back({Corner{0, 0}, Corner{1, 0}, Corner{2, 0}});
  CameraPose pose;
  pose.width = pose.height = 64;
  const Camera cam(pose);
  const auto gb = rasterize_gbuffer(m, cam);
  int covered = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const std::size_t i = gb.index(x, y);
      if (gb.face[i] == GBuffer::kNone) continue;
      ++covered;
      CHECK(y >= 32);  // the floor is below the horizon
      const Vec3 p = interpolate_position(m, 0, gb.bary[i]);
      CHECK(p.z() == doctest::Approx(-0.5));
      const auto sp = cam.project(p);
      REQUIRE(sp);
      // vertices are snapped to 1/256 pixel before interpolation
      CHECK(std::abs(sp->x - (x + 0.5)) < 2.0 / 256);
      CHECK(std::abs(sp->y - (y + 0.5)) < 2.0 / 256);
      CHECK(sp->depth == doctest::Approx(gb.depth[i]).epsilon(1e-3));
    }
  }
  CHECK(covered > 0);
}

TEST_CASE("z-buffer keeps the nearer of two coaxial triangles") {
  TriangleMesh m;
  // camera at distance 4 on +X; faces at view depth 2.5 (face 0) and 2 (face 1)
  for (double x : {1.5, 2.0}) {
    const int base = static_cast<int>(m.positions.size());
    m.positions.push_back(Vec3(x, -0.3, -0.3));
    m.positions.push_back(Vec3(x, 0.3, -0.3));
    m.positions.push_back(Vec3(x, 0.0, 0.3));
    m.uvs.push_back(Vec2(0, 0));
    m.faces.push_back({Corner{base, 0}, Corner{base + 1, 0}, Corner{base + 2, 0}});
  }
  CameraPose pose;
  pose.radius = 4.0;
  pose.width = pose.height = 64;
  const auto gb = rasterize_gbuffer(m, Camera(pose));
  int overlap = 0;
  for (std::size_t i = 0; i < gb.face.size(); ++i) {
    if (gb.face[i] == GBuffer::kNone) continue;
    if (gb.face[i] == 1) {
      ++overlap;
      CHECK(gb.depth[i] == doctest::Approx(2.0));
    }
  }
  CHECK(overlap > 100);

  // equal depth: the lower face id wins
  m.positions[3].x() = 1.5;
  m.positions[4].x() = 1.5;
  m.positions[5].x() = 1.5;
  const auto tie = rasterize_gbuffer(m, Camera(pose));
  CHECK(std::none_of(tie.face.begin(), tie.face.end(), [](std::int32_t f) { return f == 1; }));
}

TEST_CASE("rasterizer matches the brute-force oracle on random meshes") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const TriangleMesh m = fixtures::random_mesh(rng, 50);
    CameraPose pose;
    pose.elevation = std::uniform_real_distribution<double>(-80, 80)(rng);
    pose.azimuth = std::uniform_real_distribution<double>(0, 360)(rng);
    pose.width = pose.height = 96;
    const Camera cam(pose);
    const auto gb = rasterize_gbuffer(m, cam);
    const auto ref = fixtures::brute_force_raster(m, cam);
    CHECK(gb.face == ref.face);
    CHECK(gb.depth == ref.depth);
  }
}

TEST_CASE("perspective-correct UV interpolation on an oblique quad") {
  TriangleMesh m;
  m.positions = {Vec3(-0.8, -0.8, -0.3), Vec3(0.8, -0.8, -0.3), Vec3(0.8, 0.8, 0.5), Vec3(-0.8, 0.8, 0.5)};
  m.uvs = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  m.faces.push_back({Corner{0, 0}, Corner{1, 1}, Corner{2, 2}});
  m.faces.push_back({Corner{0, 0}, Corner{2, 2}, Corner{3, 3}});
  CameraPose pose;
  pose.elevation = 25;
  pose.azimuth = 300;
  pose.radius = 2.2;
  pose.width = pose.height = 128;
  const Camera cam(pose);
  const auto gb = rasterize_gbuffer(m, cam);

  // analytic: intersect the pixel ray with the plane and invert the bilinear map
  const Eigen::Matrix4d inv = (cam.matrices().projection * cam.matrices().view).inverse();
  const Vec3 origin = m.positions[0];
  const Vec3 eu = m.positions[1] - origin;
  const Vec3 ev = m.positions[3] - origin;
  const Vec3 normal = eu.cross(ev);
  int checked = 0;
  double worst = 0.0;
  for (int y = 0; y < pose.height; ++y) {
    for (int x = 0; x < pose.width; ++x) {
      const std::size_t i = gb.index(x, y);
      if (gb.face[i] == GBuffer::kNone) continue;
      const double nx = 2.0 * (x + 0.5) / pose.width - 1.0;
      const double ny = 1.0 - 2.0 * (y + 0.5) / pose.height;
      Eigen::Vector4d far = inv * Eigen::Vector4d(nx, ny, 0.5, 1.0);
      const Vec3 target = far.head<3>() / far.w();
      const Vec3 dir = (target - cam.eye()).normalized();
      const double t = (origin - cam.eye()).dot(normal) / dir.dot(normal);
      const Vec3 hit = cam.eye() + t * dir;
      const Vec3 d = hit - origin;
      const double u = d.dot(eu) / eu.squaredNorm();
      const double v = d.dot(ev) / ev.squaredNorm();
      const Vec2 got = interpolate_uv(m, std::size_t(gb.face[i]), gb.bary[i]);
      worst = std::max({worst, std::abs(got.x() - u), std::abs(got.y() - v)});
      ++checked;
    }
  }
  CHECK(checked > 1000);
  CHECK(worst < 1e-3);
}

TEST_CASE("render_view samples the albedo and agrees with the G-buffer") {
  const auto parts = fixtures::occlusion_pair();
  const auto table = MaterialTable::defaults();
  const Asset a = fixtures::make_asset(parts.mesh, fixtures::paint_cells(parts, table, 256));
  CameraPose pose;
  pose.width = pose.height = 128;
  const auto view = render_view(a, pose);
  const auto metal = table.classes[material::kMetal].display_color;
  int opaque = 0;
  for (std::size_t i = 0; i < view.gbuffer.face.size(); ++i) {
    const bool covered = view.gbuffer.face[i] != GBuffer::kNone;
    CHECK((view.color.pixels[i * 4 + 3] == 255) == covered);
    if (!covered) continue;
    ++opaque;
    // head-on, only the front (metal) quad is visible
    CHECK(parts.face_class[std::size_t(view.gbuffer.face[i])] == material::kMetal);
    for (int c = 0; c < 3; ++c) CHECK(view.color.pixels[i * 4 + c] == metal[c]);
  }
  CHECK(opaque > 1000);

  const auto gray = depth_to_gray16(view.gbuffer, pose.radius);
  CHECK(gray.size() == view.gbuffer.face.size());
}
