#include "scanplan/scene.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "scanplan/errors.hpp"

namespace scanplan::scene {

double TriangleMesh::triangle_area(std::size_t tri) const {
  const Vec3& a = corner(tri, 0);
  return 0.5 * (corner(tri, 1) - a).cross(corner(tri, 2) - a).norm();
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += triangle_area(i);
  return sum;
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& tri : triangles) {
    for (auto v : tri) box.expand(vertices[v]);
  }
  return box;
}

LoadedMesh make_mesh(std::vector<Vec3> vertices,
                     const std::vector<Triangle>& triangles) {
  LoadedMesh out;
  out.mesh.vertices = std::move(vertices);
  const auto& vs = out.mesh.vertices;
  for (const auto& tri : triangles) {
    const Vec3 cross = (vs[tri[1]] - vs[tri[0]]).cross(vs[tri[2]] - vs[tri[0]]);
    const double area = 0.5 * cross.norm();
    if (!(area > kMinTriangleArea)) {
      ++out.dropped_count;
      continue;
    }
    out.mesh.triangles.push_back(tri);
    out.mesh.normals.push_back(cross / (2.0 * area));
  }
  return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

double parse_double(std::string_view token, std::size_t line_no) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, fmt::format("bad number '{}'", token));
  }
  return value;
}

long parse_index(std::string_view token, std::size_t line_no) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long value = 0;
  const auto* end = head.data() + head.size();
  auto [ptr, ec] = std::from_chars(head.data(), end, value);
  if (head.empty() || ec != std::errc() || ptr != end || value == 0) {
    throw ParseError(line_no, fmt::format("bad face index '{}'", token));
  }
  return value;
}

}  // namespace

LoadedMesh parse_obj(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto tokens = split_ws(std::string_view(line).substr(0, hash));
    if (tokens.empty()) continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw ParseError(line_no, "vertex needs 3 coordinates");
      vertices.emplace_back(parse_double(tokens[1], line_no),
                            parse_double(tokens[2], line_no),
                            parse_double(tokens[3], line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) throw ParseError(line_no, "face needs at least 3 vertices");
      std::vector<std::uint32_t> face;
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        long idx = parse_index(tokens[k], line_no);
        // Negative indices are relative to the vertices read so far.
        if (idx < 0) idx = static_cast<long>(vertices.size()) + idx + 1;
        if (idx < 1 || idx > static_cast<long>(vertices.size())) {
          throw ParseError(line_no, fmt::format("face index {} out of range", tokens[k]));
        }
        face.push_back(static_cast<std::uint32_t>(idx - 1));
      }
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        triangles.push_back({face[0], face[k], face[k + 1]});
      }
    }
  }
  LoadedMesh out = make_mesh(std::move(vertices), triangles);
  if (out.mesh.empty()) throw EmptyMesh("mesh has no valid triangles");
  return out;
}

LoadedMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return parse_obj(in);
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  for (const auto& v : mesh.vertices) {
    out << fmt::format("v {} {} {}\n", v.x(), v.y(), v.z());
  }
  for (const auto& t : mesh.triangles) {
    out << fmt::format("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
  }
}

namespace {

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh,
                                          double target_spacing,
                                          std::uint64_t seed) {
  if (!(target_spacing > 0.0)) throw Error("sample spacing must be positive");
  std::vector<SurfaceSample> samples;
  if (mesh.empty()) return samples;

  std::vector<double> cumulative(mesh.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    total += mesh.triangle_area(i);
    cumulative[i] = total;
  }
  const auto count = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(total / (target_spacing * target_spacing))));
  const double step = total / static_cast<double>(count);

  std::mt19937_64 rng(seed);
  const double offset = unit_double(rng);
  samples.reserve(count);
  std::size_t tri = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = (static_cast<double>(k) + offset) * step;
    while (tri + 1 < mesh.size() && cumulative[tri] <= target) ++tri;
    const double r1 = std::sqrt(unit_double(rng));
    const double r2 = unit_double(rng);
    const Vec3 p = (1.0 - r1) * mesh.corner(tri, 0) +
                   r1 * (1.0 - r2) * mesh.corner(tri, 1) +
                   r1 * r2 * mesh.corner(tri, 2);
    samples.push_back({p, mesh.normals[tri], step, static_cast<std::uint32_t>(tri)});
  }
  return samples;
}

// --- BVH -------------------------------------------------------------------

namespace {

constexpr std::uint32_t kLeafSize = 4;

bool segment_hits_box(const Vec3& p, const Vec3& inv_dir, const Aabb& box) {
  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    double lo = (box.min[axis] - p[axis]) * inv_dir[axis];
    double hi = (box.max[axis] - p[axis]) * inv_dir[axis];
    if (std::isnan(lo) || std::isnan(hi)) {
      // Zero direction component: inside the slab iff p is.
      if (p[axis] < box.min[axis] || p[axis] > box.max[axis]) return false;
      continue;
    }
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  const auto n = static_cast<std::uint32_t>(mesh.size());
  if (n == 0) return;
  std::vector<Aabb> boxes(n);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) boxes[i].expand(mesh.corner(i, k));
    centroids[i] = boxes[i].center();
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * n);
  build(0, n, boxes, centroids);
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end,
                         const std::vector<Aabb>& boxes,
                         const std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb centroid_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    box.expand(boxes[order_[i]]);
    centroid_box.expand(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  int axis = 0;
  centroid_box.extent().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centroids[a][axis] != centroids[b][axis]) {
                       return centroids[a][axis] < centroids[b][axis];
                     }
                     return a < b;
                   });
  const std::uint32_t left = build(begin, mid, boxes, centroids);
  const std::uint32_t right = build(mid, end, boxes, centroids);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

bool Bvh::segment_blocked(const Vec3& p, const Vec3& q) const {
  if (nodes_.empty()) return false;
  const Vec3 dir = q - p;
  const Vec3 inv_dir = dir.cwiseInverse();
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!segment_hits_box(p, inv_dir, node.box)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto tri = order_[i];
        if (segment_hits_triangle(p, q, mesh_->corner(tri, 0), mesh_->corner(tri, 1),
                                  mesh_->corner(tri, 2))) {
          return true;
        }
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.first;
    }
  }
  return false;
}

bool Bvh::any_within(const Vec3& p, double radius) const {
  if (nodes_.empty()) return false;
  const double r2 = radius * radius;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(p) > r2) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto tri = order_[i];
        if (point_triangle_distance(p, mesh_->corner(tri, 0), mesh_->corner(tri, 1),
                                    mesh_->corner(tri, 2)) <= radius) {
          return true;
        }
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.first;
    }
  }
  return false;
}

Scene::Scene(TriangleMesh mesh)
    : mesh_(std::make_unique<TriangleMesh>(std::move(mesh))), bvh_(*mesh_) {}

bool Scene::segment_clear(const Vec3& a, const Vec3& b) const {
  // Canonical endpoint order keeps the floating-point path identical for
  // (a, b) and (b, a).
  const bool swap = std::lexicographical_compare(b.data(), b.data() + 3, a.data(), a.data() + 3);
  return swap ? !bvh_.segment_blocked(b, a) : !bvh_.segment_blocked(a, b);
}

bool visible(const SurfaceSample& sample, const Vec3& camera_position,
             const Scene& scene, double epsilon) {
  return scene.segment_clear(sample.position + epsilon * sample.normal, camera_position);
}

}  // namespace scanplan::scene
