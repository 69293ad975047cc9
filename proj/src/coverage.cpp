#include "scanplan/coverage.hpp"

#include <bit>
#include <map>

#include "scanplan/errors.hpp"

namespace scanplan::coverage {

CoverageParams resolve(CoverageParams params, const Aabb& scene_bounds) {
  if (params.d0 <= 0.0) params.d0 = 0.25 * scene_bounds.diagonal();
  if (params.d0 <= 0.0) params.d0 = 1.0;
  if (params.d_cutoff <= 0.0) params.d_cutoff = 4.0 * params.d0;
  if (params.bins <= 0) throw ConfigError("coverage bins must be positive");
  if (!(params.fov_half_angle_deg > 0.0 && params.fov_half_angle_deg < 90.0)) {
    throw ConfigError("fov_half_angle_deg must lie in (0, 90)");
  }
  if (!(params.alpha0_deg >= 0.0 && params.alpha0_deg <= 90.0)) {
    throw ConfigError("alpha0_deg must lie in [0, 90]");
  }
  return params;
}

Hemisphere::Hemisphere(int bins) {
  if (bins <= 0) throw Error("hemisphere needs at least one bin");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  const double solid_angle = 2.0 * kPi / bins;
  directions_.reserve(bins);
  for (int m = 0; m < bins; ++m) {
    const double z = 1.0 - (m + 0.5) / bins;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * m;
    directions_.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    // cos(polar angle) is z itself.
    weights_.push_back(std::max(0.0, z));
    units_.push_back(std::llround(weights_.back() * solid_angle / kRewardUnit));
    full_units_ += units_.back();
  }
}

bool in_view_cone(const CameraPose& camera, const Vec3& target) {
  const Vec3 dir = target - camera.position;
  const double dist = dir.norm();
  if (dist == 0.0) return false;
  return camera.look_at.dot(dir) >= std::cos(deg_to_rad(camera.fov_half_angle_deg)) * dist;
}

namespace {

// Everything except the view-cone and visibility tests.
std::optional<Disk> geometric_disk(const CameraPose& camera, const SurfaceSample& sample,
                                   const Vec3& tangent, const Vec3& bitangent,
                                   const CoverageParams& params) {
  const Vec3 to_camera = camera.position - sample.position;
  const double dist = to_camera.norm();
  if (dist == 0.0 || dist > params.d_cutoff) return std::nullopt;
  const Vec3 u = to_camera / dist;
  const Vec3 local(tangent.dot(u), bitangent.dot(u), sample.normal.dot(u));
  if (local.z() < 0.0) return std::nullopt;
  const double polar = std::acos(std::min(1.0, local.z()));
  double radius = deg_to_rad(params.alpha0_deg) * std::exp(-dist / params.d0);
  radius = std::max(0.0, std::min(radius, 0.5 * kPi - polar));
  return Disk{local.normalized(), radius};
}

}  // namespace

std::optional<Disk> make_disk(const CameraPose& camera, const SurfaceSample& sample,
                              const Scene& scene, const CoverageParams& params) {
  Vec3 t;
  Vec3 b;
  tangent_frame(sample.normal, t, b);
  auto disk = geometric_disk(camera, sample, t, b, params);
  if (!disk) return std::nullopt;
  if (!in_view_cone(camera, sample.position)) return std::nullopt;
  if (!scene::visible(sample, camera.position, scene, params.visibility_epsilon)) {
    return std::nullopt;
  }
  return disk;
}

CoverageModel::CoverageModel(const Scene& scene, std::vector<SurfaceSample> samples,
                             CoverageParams params)
    : scene_(&scene),
      samples_(std::move(samples)),
      params_(resolve(params, scene.mesh().bounds())),
      hemisphere_(params_.bins) {
  tangents_.resize(samples_.size());
  bitangents_.resize(samples_.size());
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    tangent_frame(samples_[j].normal, tangents_[j], bitangents_[j]);
  }
}

std::optional<Disk> CoverageModel::make_disk(const CameraPose& camera, std::size_t sample) const {
  const auto& s = samples_[sample];
  auto disk = geometric_disk(camera, s, tangents_[sample], bitangents_[sample], params_);
  if (!disk) return std::nullopt;
  if (!in_view_cone(camera, s.position)) return std::nullopt;
  if (!scene::visible(s, camera.position, *scene_, params_.visibility_epsilon)) return std::nullopt;
  return disk;
}

void CoverageModel::disk_mask(const Disk& disk, std::span<std::uint64_t> out) const {
  std::fill(out.begin(), out.end(), 0);
  const double cos_r = std::cos(disk.angular_radius);
  const auto& dirs = hemisphere_.directions();
  for (int m = 0; m < hemisphere_.size(); ++m) {
    if (dirs[m].dot(disk.center_direction) >= cos_r) out[m / 64] |= std::uint64_t{1} << (m % 64);
  }
}

Footprint CoverageModel::footprint(const CameraPose& camera) const {
  const int words = hemisphere_.words();
  Footprint fp;
  std::vector<std::uint64_t> mask(words);
  for (std::size_t j = 0; j < samples_.size(); ++j) {
    const auto disk = make_disk(camera, j);
    if (!disk) continue;
    disk_mask(*disk, mask);
    if (std::all_of(mask.begin(), mask.end(), [](auto w) { return w == 0; })) continue;
    fp.samples.push_back(static_cast<std::uint32_t>(j));
    fp.masks.insert(fp.masks.end(), mask.begin(), mask.end());
  }
  return fp;
}

std::vector<Footprint> CoverageModel::footprints(std::span<const CameraPose> cameras) const {
  const int words = hemisphere_.words();
  std::vector<Footprint> out(cameras.size());

  // Group poses by exact position.
  std::map<std::array<double, 3>, std::vector<std::size_t>> by_position;
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const auto& p = cameras[i].position;
    by_position[{p.x(), p.y(), p.z()}].push_back(i);
  }

  std::vector<std::uint32_t> candidates;
  std::vector<std::uint64_t> masks;
  std::vector<std::uint64_t> mask(words);
  for (const auto& [key, poses] : by_position) {
    const CameraPose& first = cameras[poses.front()];
    candidates.clear();
    masks.clear();
    for (std::size_t j = 0; j < samples_.size(); ++j) {
      const auto disk = geometric_disk(first, samples_[j], tangents_[j], bitangents_[j], params_);
      if (!disk) continue;
      disk_mask(*disk, mask);
      if (std::all_of(mask.begin(), mask.end(), [](auto w) { return w == 0; })) continue;
      if (!scene::visible(samples_[j], first.position, *scene_, params_.visibility_epsilon)) continue;
      candidates.push_back(static_cast<std::uint32_t>(j));
      masks.insert(masks.end(), mask.begin(), mask.end());
    }
    for (std::size_t pose : poses) {
      Footprint& fp = out[pose];
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (!in_view_cone(cameras[pose], samples_[candidates[c]].position)) continue;
        fp.samples.push_back(candidates[c]);
        fp.masks.insert(fp.masks.end(), masks.begin() + c * words, masks.begin() + (c + 1) * words);
      }
    }
  }
  return out;
}

RewardUnits CoverageModel::mask_units(std::span<const std::uint64_t> mask) const {
  const auto& units = hemisphere_.bin_units();
  const std::size_t words = static_cast<std::size_t>(hemisphere_.words());
  RewardUnits sum = 0;
  for (std::size_t w = 0; w < mask.size(); ++w) {
    std::uint64_t bits = mask[w];
    while (bits != 0) {
      sum += units[(w % words) * 64 + std::countr_zero(bits)];
      bits &= bits - 1;
    }
  }
  return sum;
}

RewardUnits CoverageModel::gain_units(const CoverageState& state, const Footprint& fp) const {
  const int words = state.words_;
  const auto& units = hemisphere_.bin_units();
  RewardUnits gain = 0;
  for (std::size_t e = 0; e < fp.samples.size(); ++e) {
    const std::uint64_t* covered = state.covered_.data() + std::size_t{fp.samples[e]} * words;
    const std::uint64_t* mask = fp.masks.data() + e * words;
    for (int w = 0; w < words; ++w) {
      std::uint64_t fresh = mask[w] & ~covered[w];
      while (fresh != 0) {
        gain += units[w * 64 + std::countr_zero(fresh)];
        fresh &= fresh - 1;
      }
    }
  }
  return gain;
}

void CoverageModel::apply(CoverageState& state, const Footprint& fp) const {
  state.units_ += gain_units(state, fp);
  const int words = state.words_;
  for (std::size_t e = 0; e < fp.samples.size(); ++e) {
    std::uint64_t* covered = state.covered_.data() + std::size_t{fp.samples[e]} * words;
    const std::uint64_t* mask = fp.masks.data() + e * words;
    for (int w = 0; w < words; ++w) covered[w] |= mask[w];
  }
}

double CoverageModel::evaluate(std::span<const CameraPose> cameras) const {
  std::vector<Footprint> fps = footprints(cameras);
  std::vector<const Footprint*> ptrs;
  for (const auto& fp : fps) ptrs.push_back(&fp);
  return evaluate(ptrs);
}

double CoverageModel::evaluate(std::span<const Footprint* const> footprints) const {
  const int words = hemisphere_.words();
  std::vector<std::uint64_t> uni(samples_.size() * words, 0);
  for (const Footprint* fp : footprints) {
    for (std::size_t e = 0; e < fp->samples.size(); ++e) {
      for (int w = 0; w < words; ++w) {
        uni[std::size_t{fp->samples[e]} * words + w] |= fp->masks[e * words + w];
      }
    }
  }
  return to_reward(mask_units(uni));
}

RewardUnits CoverageModel::recompute_units(const CoverageState& state) const {
  return mask_units(state.covered_);
}

}  // namespace scanplan::coverage
