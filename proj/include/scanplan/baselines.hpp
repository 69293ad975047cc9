#pragma once

#include <cstdint>
#include <span>

#include "scanplan/coverage.hpp"
#include "scanplan/free_space.hpp"
#include "scanplan/greedy.hpp"
#include "scanplan/orienteering.hpp"

namespace scanplan::baselines {

using coverage::CameraPose;
using orienteering::HopMetric;
using orienteering::PlanGraph;
using orienteering::Trajectory;

struct BaselineConfig {
  double orbit_radius = 35.0;
  double orbit_height = 35.0;
  int orbit_segments = 64;
  double row_spacing = 20.0;
  Vec3 scene_center = Vec3::Zero();
  Aabb footprint;  // lawnmower area (x, y); z is ignored
  std::uint64_t seed = 1;
  double budget = 960.0;
  double image_spacing = 3.5;
  double fov_half_angle_deg = 45.0;
};

// Orbit (camera on the scene center) then boustrophedon rows along x
// (camera straight down), both at orbit_height, cut off exactly at the
// budget. The path is open and off-graph. Throws NotInFreeSpace.
Trajectory overhead_trajectory(const BaselineConfig& cfg, const scene::FreeSpaceGrid& free);

// Full, untruncated overhead polyline; exposed for length audits.
std::vector<Vec3> overhead_polyline(const BaselineConfig& cfg);

CameraPose look_toward(const Vec3& position, const Vec3& target, double fov_half_angle_deg);

// Node poses chosen by the greedy orientation pass.
std::vector<CameraPose> greedy_node_poses(const greedy::GreedyResult& result,
                                          const greedy::GroundSet& ground_set);

// Draws uniformly among unvisited nodes whose detour plus return fits the
// remaining budget; every pose looks at `center`.
Trajectory random_trajectory(const PlanGraph& graph, const HopMetric& metric, double budget,
                             std::uint64_t seed, const Vec3& center, double fov_half_angle_deg);

// Approx-TSP over the metric closure: Prim MST from the root, preorder walk,
// shortcut duplicates. Returns the target order starting at the root.
std::vector<int> approx_tsp_order(const HopMetric& metric, std::span<const int> nodes, int root);
int tour_hops(const HopMetric& metric, std::span<const int> order);
int mst_hops(const HopMetric& metric, std::span<const int> nodes, int root);

// Adds nodes by largest true coverage gain; stops before the first addition
// whose Approx-TSP tour exceeds the budget.
Trajectory next_best_view(const PlanGraph& graph, const HopMetric& metric,
                          const coverage::CoverageModel& model,
                          std::span<const coverage::Footprint> node_footprints,
                          std::span<const CameraPose> node_poses, double budget);

// As next_best_view but ranks by gain per added hop of the cheapest
// insertion into the current tour, over insertions that fit the budget.
Trajectory ratio_greedy(const PlanGraph& graph, const HopMetric& metric,
                        const coverage::CoverageModel& model,
                        std::span<const coverage::Footprint> node_footprints,
                        std::span<const CameraPose> node_poses, double budget);

}  // namespace scanplan::baselines
