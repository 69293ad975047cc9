#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "scanplan/geometry.hpp"

namespace scanplan::scene {

using Triangle = std::array<std::uint32_t, 3>;

// Triangles below this area (m^2) are treated as degenerate and dropped.
inline constexpr double kMinTriangleArea = 1e-12;

inline constexpr double kDefaultVisibilityEpsilon = 1e-3;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Vec3> normals;  // one unit normal per triangle

  std::size_t size() const { return triangles.size(); }
  bool empty() const { return triangles.empty(); }

  const Vec3& corner(std::size_t tri, int k) const {
    return vertices[triangles[tri][k]];
  }
  double triangle_area(std::size_t tri) const;
  double total_area() const;
  Aabb bounds() const;
};

struct LoadedMesh {
  TriangleMesh mesh;
  std::size_t dropped_count = 0;
};

// Builds a mesh from raw triangles, computing normals and dropping
// zero-area triangles. Indices must already be in range.
LoadedMesh make_mesh(std::vector<Vec3> vertices,
                     const std::vector<Triangle>& triangles);

// Parses `v` and `f` statements; polygons are fan-triangulated, all other
// statements are ignored. Throws ParseError or EmptyMesh.
LoadedMesh parse_obj(std::istream& in);
LoadedMesh load_mesh(const std::filesystem::path& path);

void write_obj(const TriangleMesh& mesh, std::ostream& out);

struct SurfaceSample {
  Vec3 position;
  Vec3 normal;
  double area_weight = 0.0;
  std::uint32_t triangle = 0;
};

// Area-weighted sampling: round(area / spacing^2) samples are placed on a
// stratified sweep of the cumulative triangle-area distribution (one random
// offset), each at a uniform barycentric location inside its triangle.
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh,
                                          double target_spacing,
                                          std::uint64_t seed);

class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(const TriangleMesh& mesh);

  // Any triangle touched by the closed segment [p, q].
  bool segment_blocked(const Vec3& p, const Vec3& q) const;
  // Any triangle with distance <= radius from p.
  bool any_within(const Vec3& p, double radius) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // first triangle (leaf) or left child (inner)
    std::uint32_t count = 0;  // > 0 for leaves
    std::uint32_t right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end,
                      const std::vector<Aabb>& boxes,
                      const std::vector<Vec3>& centroids);
  template <typename Visit>
  bool any_leaf(const Vec3& p, const Vec3& q, Visit&& visit) const;

  const TriangleMesh* mesh_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

// Immutable mesh plus its acceleration structure; safe for concurrent reads.
class Scene {
 public:
  explicit Scene(TriangleMesh mesh);
  Scene(const Scene&) = delete;
  Scene& operator=(const Scene&) = delete;

  const TriangleMesh& mesh() const { return *mesh_; }
  const Bvh& bvh() const { return bvh_; }

  // Endpoint order does not affect the answer.
  bool segment_clear(const Vec3& a, const Vec3& b) const;

 private:
  std::unique_ptr<TriangleMesh> mesh_;
  Bvh bvh_;
};

// Line of sight from sample.position + epsilon * normal to the camera.
bool visible(const SurfaceSample& sample, const Vec3& camera_position,
             const Scene& scene, double epsilon = kDefaultVisibilityEpsilon);

}  // namespace scanplan::scene
