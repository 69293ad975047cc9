#include "scanplan/free_space.hpp"

#include <fstream>

#include <json.hpp>

#include "scanplan/errors.hpp"

namespace scanplan::scene {

FreeSpaceGrid::FreeSpaceGrid(const Aabb& bbox, double voxel_size, double clearance)
    : bbox_(bbox), voxel_size_(voxel_size), clearance_(clearance) {
  if (!(voxel_size > 0.0)) throw Error("voxel size must be positive");
  if (!(clearance >= 0.0)) throw Error("clearance must be non-negative");
  const Vec3 extent = bbox.extent();
  for (int axis = 0; axis < 3; ++axis) {
    const double cells = std::ceil(extent[axis] / voxel_size - 1e-9);
    dims_[axis] = cells > 0.0 ? static_cast<int>(cells) : 0;
  }
  if (dims_[0] <= 0 || dims_[1] <= 0 || dims_[2] <= 0) {
    throw BoxTooSmall("bounding box too small for the voxel size");
  }
  free_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0);
}

std::size_t FreeSpaceGrid::free_count() const {
  std::size_t n = 0;
  for (auto v : free_) n += v;
  return n;
}

Vec3 FreeSpaceGrid::center(const VoxelIndex& v) const {
  return bbox_.min + voxel_size_ * Vec3(v[0] + 0.5, v[1] + 0.5, v[2] + 0.5);
}

std::optional<VoxelIndex> FreeSpaceGrid::voxel_of(const Vec3& p) const {
  const double tol = 1e-9 * std::max(1.0, bbox_.diagonal());
  if (!bbox_.contains(p, tol)) return std::nullopt;
  VoxelIndex v;
  for (int axis = 0; axis < 3; ++axis) {
    const int i = static_cast<int>(std::floor((p[axis] - bbox_.min[axis]) / voxel_size_));
    v[axis] = std::clamp(i, 0, dims_[axis] - 1);
  }
  return v;
}

bool FreeSpaceGrid::point_free(const Vec3& p) const {
  const auto v = voxel_of(p);
  return v && is_free(*v);
}

bool FreeSpaceGrid::segment_free(const Vec3& a, const Vec3& b) const {
  const double length = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(length / (0.25 * voxel_size_))));
  for (int s = 0; s <= steps; ++s) {
    if (!point_free(a + (b - a) * (static_cast<double>(s) / steps))) return false;
  }
  return true;
}

void FreeSpaceGrid::save(const std::filesystem::path& manifest,
                         const std::filesystem::path& bits) const {
  nlohmann::json header = {
      {"format", "scanplan-free-space-v1"},
      {"dims", {dims_[0], dims_[1], dims_[2]}},
      {"origin", {bbox_.min.x(), bbox_.min.y(), bbox_.min.z()}},
      {"bbox_max", {bbox_.max.x(), bbox_.max.y(), bbox_.max.z()}},
      {"voxel_size", voxel_size_},
      {"clearance", clearance_},
      {"order", "row-major x,y,z (z fastest), LSB-first bits"},
      {"bits_file", bits.filename().string()},
  };
  std::ofstream(manifest) << header.dump(2) << '\n';
  std::vector<std::uint8_t> packed((free_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < free_.size(); ++i) {
    if (free_[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  std::ofstream out(bits, std::ios::binary);
  out.write(reinterpret_cast<const char*>(packed.data()),
            static_cast<std::streamsize>(packed.size()));
}

FreeSpaceGrid FreeSpaceGrid::load(const std::filesystem::path& manifest,
                                  const std::filesystem::path& bits) {
  std::ifstream in(manifest);
  if (!in) throw FileNotFound(manifest.string());
  const auto header = nlohmann::json::parse(in);
  const auto& o = header.at("origin");
  const auto& m = header.at("bbox_max");
  FreeSpaceGrid grid(Aabb(Vec3(o[0], o[1], o[2]), Vec3(m[0], m[1], m[2])),
                     header.at("voxel_size").get<double>(),
                     header.at("clearance").get<double>());
  const auto dims = header.at("dims").get<std::array<int, 3>>();
  if (dims != grid.dims_) throw ParseError(0, "free-space manifest dims disagree with bbox");
  std::ifstream bin(bits, std::ios::binary);
  if (!bin) throw FileNotFound(bits.string());
  std::vector<std::uint8_t> packed((grid.free_.size() + 7) / 8, 0);
  bin.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
  if (bin.gcount() != static_cast<std::streamsize>(packed.size())) {
    throw ParseError(0, "free-space bit file truncated");
  }
  for (std::size_t i = 0; i < grid.free_.size(); ++i) {
    grid.free_[i] = (packed[i / 8] >> (i % 8)) & 1u;
  }
  return grid;
}

bool FreeSpaceGrid::operator==(const FreeSpaceGrid& other) const {
  return bbox_.min == other.bbox_.min && bbox_.max == other.bbox_.max &&
         voxel_size_ == other.voxel_size_ && clearance_ == other.clearance_ &&
         dims_ == other.dims_ && free_ == other.free_;
}

FreeSpaceGrid build_free_space(const Scene& scene, const Aabb& bbox, double voxel_size,
                               double clearance) {
  FreeSpaceGrid grid(bbox, voxel_size, clearance);
  const auto& dims = grid.dims();
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        const VoxelIndex v{i, j, k};
        const Vec3 c = grid.center(v);
        // Strict inequality: distance must exceed the clearance.
        grid.set_free(v, bbox.contains(c) && !scene.bvh().any_within(c, clearance));
      }
    }
  }
  return grid;
}

}  // namespace scanplan::scene
