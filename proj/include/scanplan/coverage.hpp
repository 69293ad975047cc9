#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scanplan/geometry.hpp"
#include "scanplan/scene.hpp"

namespace scanplan::coverage {

using scene::Scene;
using scene::SurfaceSample;

struct CoverageParams {
  double alpha0_deg = 15.0;
  double d0 = 0.0;        // <= 0: a quarter of the scene bounding-box diagonal
  double d_cutoff = 0.0;  // <= 0: 4 * d0
  int bins = 128;
  double fov_half_angle_deg = 45.0;
  double visibility_epsilon = scene::kDefaultVisibilityEpsilon;
};

// Fills in the scene-dependent defaults of d0 and d_cutoff.
CoverageParams resolve(CoverageParams params, const Aabb& scene_bounds);

struct CameraPose {
  Vec3 position = Vec3::Zero();
  Vec3 look_at = Vec3(0, 0, -1);
  double fov_half_angle_deg = 45.0;
};

// Rewards are accumulated as integers in units of 2^-32 weighted steradians,
// so sums are exact and independent of evaluation order.
using RewardUnits = std::int64_t;
inline constexpr double kRewardUnit = 0x1.0p-32;
inline double to_reward(RewardUnits units) { return static_cast<double>(units) * kRewardUnit; }

// Equal-area discretization of the unit hemisphere (z >= 0) by a Fibonacci
// spiral: bin m sits at z = 1 - (m + 0.5) / M, so every bin spans 2*pi/M sr.
class Hemisphere {
 public:
  explicit Hemisphere(int bins);

  int size() const { return static_cast<int>(directions_.size()); }
  int words() const { return (size() + 63) / 64; }
  const std::vector<Vec3>& directions() const { return directions_; }
  const std::vector<double>& weights() const { return weights_; }
  double bin_solid_angle() const { return 2.0 * kPi / size(); }
  // Quantized weight * solid angle of each bin.
  const std::vector<RewardUnits>& bin_units() const { return units_; }
  RewardUnits full_units() const { return full_units_; }

 private:
  std::vector<Vec3> directions_;
  std::vector<double> weights_;
  std::vector<RewardUnits> units_;
  RewardUnits full_units_ = 0;
};

struct Disk {
  Vec3 center_direction;  // local frame of the sample, z = normal
  double angular_radius = 0.0;
};

// True iff the angle between look_at and the direction to `target` does not
// exceed the pose's half field of view.
bool in_view_cone(const CameraPose& camera, const Vec3& target);

std::optional<Disk> make_disk(const CameraPose& camera, const SurfaceSample& sample,
                              const Scene& scene, const CoverageParams& params);

// The bins one camera covers: parallel arrays of sample ids and bit masks
// (`words` 64-bit words per sample).
struct Footprint {
  std::vector<std::uint32_t> samples;
  std::vector<std::uint64_t> masks;
};

class CoverageState {
 public:
  CoverageState() = default;
  CoverageState(std::size_t samples, int words)
      : words_(words), covered_(samples * static_cast<std::size_t>(words), 0) {}

  RewardUnits units() const { return units_; }
  double reward() const { return to_reward(units_); }
  int words() const { return words_; }
  std::span<const std::uint64_t> covered(std::size_t sample) const {
    return {covered_.data() + sample * words_, static_cast<std::size_t>(words_)};
  }
  bool operator==(const CoverageState&) const = default;

 private:
  friend class CoverageModel;
  int words_ = 0;
  std::vector<std::uint64_t> covered_;
  RewardUnits units_ = 0;
};

// Immutable coverage objective over a fixed set of surface samples.
class CoverageModel {
 public:
  CoverageModel(const Scene& scene, std::vector<SurfaceSample> samples, CoverageParams params);

  const Scene& scene() const { return *scene_; }
  const std::vector<SurfaceSample>& samples() const { return samples_; }
  const CoverageParams& params() const { return params_; }
  const Hemisphere& hemisphere() const { return hemisphere_; }

  std::optional<Disk> make_disk(const CameraPose& camera, std::size_t sample) const;
  // Bins of the sample's hemisphere within the disk (boundary inclusive).
  void disk_mask(const Disk& disk, std::span<std::uint64_t> out) const;

  Footprint footprint(const CameraPose& camera) const;
  // Batch version that shares visibility and disk work between poses at
  // the same position.
  std::vector<Footprint> footprints(std::span<const CameraPose> cameras) const;

  CoverageState empty_state() const { return CoverageState(samples_.size(), hemisphere_.words()); }

  RewardUnits gain_units(const CoverageState& state, const Footprint& fp) const;
  double marginal_gain(const CoverageState& state, const Footprint& fp) const {
    return to_reward(gain_units(state, fp));
  }
  double marginal_gain(const CoverageState& state, const CameraPose& camera) const {
    return marginal_gain(state, footprint(camera));
  }
  void apply(CoverageState& state, const Footprint& fp) const;
  CoverageState apply(CoverageState state, const CameraPose& camera) const {
    apply(state, footprint(camera));
    return state;
  }

  // From-scratch value of a camera set: unions all masks, then sums.
  double evaluate(std::span<const CameraPose> cameras) const;
  double evaluate(std::span<const Footprint* const> footprints) const;
  // Re-derives the reward of a state from its bitmasks alone.
  RewardUnits recompute_units(const CoverageState& state) const;
  // Reward with every bin of every hemisphere covered.
  double max_reward() const { return to_reward(hemisphere_.full_units()) * samples_.size(); }

 private:
  RewardUnits mask_units(std::span<const std::uint64_t> mask) const;

  const Scene* scene_;
  std::vector<SurfaceSample> samples_;
  CoverageParams params_;
  Hemisphere hemisphere_;
  std::vector<Vec3> tangents_;
  std::vector<Vec3> bitangents_;
};

}  // namespace scanplan::coverage
