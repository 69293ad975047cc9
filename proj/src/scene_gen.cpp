#include "scanplan/scene_gen.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "scanplan/errors.hpp"

namespace scanplan::harness {

namespace {

class Builder {
 public:
  std::uint32_t vertex(const Vec3& p) {
    vertices_.push_back(p);
    return static_cast<std::uint32_t>(vertices_.size() - 1);
  }
  void tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) { triangles_.push_back({a, b, c}); }
  // Counter-clockwise seen from the side the face points to.
  void quad(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    tri(a, b, c);
    tri(a, c, d);
  }
  scene::TriangleMesh finish() { return scene::make_mesh(std::move(vertices_), triangles_).mesh; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<scene::Triangle> triangles_;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

scene::TriangleMesh blocks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Builder b;
  constexpr double kHalf = 50.0;
  b.quad(b.vertex({-kHalf, -kHalf, 0}), b.vertex({kHalf, -kHalf, 0}), b.vertex({kHalf, kHalf, 0}),
         b.vertex({-kHalf, kHalf, 0}));

  struct Footprint {
    double x0, x1, y0, y1;
  };
  std::vector<Footprint> placed;
  constexpr int kBoxes = 8;
  constexpr double kGap = 6.0;
  for (int attempt = 0; attempt < 500 && static_cast<int>(placed.size()) < kBoxes; ++attempt) {
    const double cx = uniform(rng, -32.0, 32.0);
    const double cy = uniform(rng, -32.0, 32.0);
    const double hx = uniform(rng, 4.0, 10.0);
    const double hy = uniform(rng, 4.0, 10.0);
    const double h = uniform(rng, 6.0, 20.0);
    const Footprint f{cx - hx, cx + hx, cy - hy, cy + hy};
    const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const Footprint& o) {
      return f.x0 < o.x1 + kGap && o.x0 < f.x1 + kGap && f.y0 < o.y1 + kGap && o.y0 < f.y1 + kGap;
    });
    if (overlaps) continue;
    placed.push_back(f);
    const auto v0 = b.vertex({f.x0, f.y0, 0});
    const auto v1 = b.vertex({f.x1, f.y0, 0});
    const auto v2 = b.vertex({f.x1, f.y1, 0});
    const auto v3 = b.vertex({f.x0, f.y1, 0});
    const auto t0 = b.vertex({f.x0, f.y0, h});
    const auto t1 = b.vertex({f.x1, f.y0, h});
    const auto t2 = b.vertex({f.x1, f.y1, h});
    const auto t3 = b.vertex({f.x0, f.y1, h});
    b.quad(t0, t1, t2, t3);  // roof
    b.quad(v0, v1, t1, t0);  // -y
    b.quad(v1, v2, t2, t1);  // +x
    b.quad(v2, v3, t3, t2);  // +y
    b.quad(v3, v0, t0, t3);  // -x
  }
  return b.finish();
}

scene::TriangleMesh barn(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double hx = 0.5 * uniform(rng, 10.0, 14.0);
  const double hy = 0.5 * uniform(rng, 18.0, 24.0);
  const double wall = uniform(rng, 5.0, 7.0);
  const double ridge = wall + uniform(rng, 3.0, 5.0);
  Builder b;
  const auto v0 = b.vertex({-hx, -hy, 0});
  const auto v1 = b.vertex({hx, -hy, 0});
  const auto v2 = b.vertex({hx, hy, 0});
  const auto v3 = b.vertex({-hx, hy, 0});
  const auto e0 = b.vertex({-hx, -hy, wall});
  const auto e1 = b.vertex({hx, -hy, wall});
  const auto e2 = b.vertex({hx, hy, wall});
  const auto e3 = b.vertex({-hx, hy, wall});
  const auto r0 = b.vertex({0, -hy, ridge});
  const auto r1 = b.vertex({0, hy, ridge});
  b.quad(v0, v3, v2, v1);  // floor, facing down
  b.quad(v1, v2, e2, e1);  // +x wall
  b.quad(v3, v0, e0, e3);  // -x wall
  b.quad(v0, v1, e1, e0);  // -y gable
  b.tri(e0, e1, r0);
  b.quad(v2, v3, e3, e2);  // +y gable
  b.tri(e2, e3, r1);
  b.quad(e1, e2, r1, r0);  // +x roof
  b.quad(e3, e0, r0, r1);  // -x roof
  return b.finish();
}

scene::TriangleMesh terrain(std::uint64_t seed, int n) {
  if (n < 2) throw UnknownSpec("terrain resolution must be at least 2");
  std::mt19937_64 rng(seed);
  double phase[4];
  for (double& p : phase) p = uniform(rng, 0.0, 2.0 * kPi);
  Builder b;
  constexpr double kHalf = 50.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = -kHalf + 2.0 * kHalf * i / (n - 1);
      const double y = -kHalf + 2.0 * kHalf * j / (n - 1);
      const double z = 4.0 + 2.5 * std::sin(0.07 * x + phase[0]) * std::cos(0.05 * y + phase[1]) +
                       1.5 * std::sin(0.13 * (x + y) + phase[2]) + std::cos(0.11 * y + phase[3]);
      b.vertex({x, y, z});
    }
  }
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const auto a = static_cast<std::uint32_t>(j * n + i);
      b.quad(a, a + 1, a + 1 + n, a + n);
    }
  }
  return b.finish();
}

}  // namespace

GeneratedScene generate_scene(const std::string& spec, std::uint64_t seed,
                              int terrain_resolution) {
  GeneratedScene out;
  if (spec == "blocks") {
    out.mesh = blocks(seed);
  } else if (spec == "barn" || spec == "barn-like") {
    out.mesh = barn(seed);
  } else if (spec == "terrain") {
    out.mesh = terrain(seed, terrain_resolution);
  } else {
    throw UnknownSpec("unknown scene spec '" + spec + "'");
  }
  const Aabb box = out.mesh.bounds();
  out.manifest = {{"spec", spec},
                  {"seed", seed},
                  {"triangles", out.mesh.size()},
                  {"vertices", out.mesh.vertices.size()},
                  {"area", out.mesh.total_area()},
                  {"bbox",
                   {{"min", {box.min.x(), box.min.y(), box.min.z()}},
                    {"max", {box.max.x(), box.max.y(), box.max.z()}}}}};
  if (spec == "terrain") out.manifest["resolution"] = terrain_resolution;
  return out;
}

void write_scene(const GeneratedScene& scene, const std::filesystem::path& dir,
                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::ofstream obj(dir / (stem + ".obj"));
  scene::write_obj(scene.mesh, obj);
  std::ofstream(dir / (stem + ".json")) << scene.manifest.dump(2) << '\n';
}

}  // namespace scanplan::harness
