#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "scanplan/geometry.hpp"
#include "scanplan/scene.hpp"

namespace scanplan::scene {

using VoxelIndex = std::array<int, 3>;

// Conservative voxelization of the free space inside a bounding box.
// Voxel (i, j, k) has its center at bbox.min + (i + 0.5, j + 0.5, k + 0.5) *
// voxel_size and is free iff that center lies inside the bbox and no
// triangle is within `clearance` of it.
class FreeSpaceGrid {
 public:
  FreeSpaceGrid() = default;
  FreeSpaceGrid(const Aabb& bbox, double voxel_size, double clearance);

  const Aabb& bbox() const { return bbox_; }
  double voxel_size() const { return voxel_size_; }
  double clearance() const { return clearance_; }
  const VoxelIndex& dims() const { return dims_; }
  std::size_t voxel_count() const { return free_.size(); }
  std::size_t free_count() const;

  // Row-major over (x, y, z): z varies fastest.
  std::size_t linear(const VoxelIndex& v) const {
    return (static_cast<std::size_t>(v[0]) * dims_[1] + v[1]) * dims_[2] + v[2];
  }
  Vec3 center(const VoxelIndex& v) const;
  bool is_free(const VoxelIndex& v) const { return free_[linear(v)] != 0; }
  void set_free(const VoxelIndex& v, bool value) { free_[linear(v)] = value ? 1 : 0; }

  // Voxel containing p; points on the bbox faces map to the boundary voxel.
  std::optional<VoxelIndex> voxel_of(const Vec3& p) const;
  bool point_free(const Vec3& p) const;
  // Samples the segment every quarter voxel, endpoints included.
  bool segment_free(const Vec3& a, const Vec3& b) const;

  // Manifest (JSON header) plus a packed bit array, LSB-first per byte.
  void save(const std::filesystem::path& manifest, const std::filesystem::path& bits) const;
  static FreeSpaceGrid load(const std::filesystem::path& manifest,
                            const std::filesystem::path& bits);

  bool operator==(const FreeSpaceGrid& other) const;

 private:
  Aabb bbox_;
  double voxel_size_ = 1.0;
  double clearance_ = 0.0;
  VoxelIndex dims_{0, 0, 0};
  std::vector<std::uint8_t> free_;
};

FreeSpaceGrid build_free_space(const Scene& scene, const Aabb& bbox, double voxel_size,
                               double clearance);

}  // namespace scanplan::scene
