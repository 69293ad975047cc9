#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "scanplan/coverage.hpp"

namespace scanplan::greedy {

using coverage::CameraPose;
using coverage::CoverageModel;
using coverage::Footprint;
using coverage::RewardUnits;

// Look-at vectors on the downward hemisphere: straight down, then one ring
// of `azimuths` directions per elevation (degrees below the horizon).
std::vector<Vec3> downward_orientations(std::span<const double> ring_elevations_deg,
                                        int azimuths);
std::vector<Vec3> default_orientations();  // 17 directions: {30, 60} deg x 8 + down

// Cartesian product of node positions and look-at vectors. Pose index
// node * orientations.size() + k has orientation k at node `node`.
struct GroundSet {
  std::vector<CameraPose> poses;
  std::vector<int> node_of;
  std::vector<Vec3> orientations;
  int node_count = 0;

  static GroundSet cartesian(std::span<const Vec3> positions, std::span<const Vec3> orientations,
                             double fov_half_angle_deg);
};

struct GreedyResult {
  std::vector<int> selected;     // node id -> chosen pose index, -1 if unselected
  std::vector<int> permutation;  // pose indices in selection order
  std::vector<RewardUnits> gain_units;
  std::vector<double> gains;
  double total_reward = 0.0;
  std::size_t evaluations = 0;  // marginal-gain evaluations performed
};

struct GreedyOptions {
  // Stop once the best available gain falls below this floor. The default
  // of 0 runs to one pose per node.
  double gain_floor = 0.0;
};

// Lazy greedy under the one-pose-per-node partition matroid. Ties go to the
// lower pose index.
GreedyResult greedy_orientations(const GroundSet& ground_set, const CoverageModel& model,
                                 std::span<const Footprint> footprints,
                                 const GreedyOptions& options = {});
GreedyResult greedy_orientations(const GroundSet& ground_set, const CoverageModel& model,
                                 const GreedyOptions& options = {});

// Same contract, re-evaluating every remaining candidate at every step.
GreedyResult naive_greedy(const GroundSet& ground_set, const CoverageModel& model,
                          std::span<const Footprint> footprints,
                          const GreedyOptions& options = {});

nlohmann::json to_json(const GreedyResult& result, const GroundSet& ground_set);

}  // namespace scanplan::greedy
