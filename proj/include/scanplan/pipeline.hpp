#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scanplan/baselines.hpp"
#include "scanplan/config.hpp"
#include "scanplan/coverage.hpp"
#include "scanplan/free_space.hpp"
#include "scanplan/greedy.hpp"
#include "scanplan/orienteering.hpp"

namespace scanplan::harness {

using orienteering::Trajectory;

// Everything the planner and the baselines share for one config. Built once
// and reused across the budgets of a sweep.
struct PlanningContext {
  ExperimentConfig config;
  std::unique_ptr<scene::Scene> scene;
  Aabb scene_bounds;
  Vec3 scene_center = Vec3::Zero();  // centroid of the mesh bounding box
  std::unique_ptr<coverage::CoverageModel> model;
  scene::FreeSpaceGrid free;
  orienteering::Lattice lattice;
  orienteering::PlanGraph graph;  // carries the surrogate rewards
  greedy::GroundSet ground_set;
  std::vector<coverage::Footprint> footprints;  // one per ground-set pose
  greedy::GreedyResult greedy;
  std::vector<coverage::CameraPose> node_poses;
  std::vector<coverage::Footprint> node_footprints;
  std::unique_ptr<orienteering::HopMetric> metric;
  std::map<std::string, double> stage_seconds;
};

scene::TriangleMesh load_scene_mesh(const ExperimentConfig& config);
std::unique_ptr<PlanningContext> prepare(const ExperimentConfig& config);

// True coverage of the poses a trajectory is scored by: the distinct node
// poses for graph walks, the captures for off-graph paths.
double score(const PlanningContext& ctx, const Trajectory& trajectory);

struct MethodRun {
  Trajectory trajectory;
  double budget = 0.0;
  double seconds = 0.0;
};

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"ours", "overhead", "random", "nbv", "ratio"};
  return names;
}

// Runs one method at `budget`, filling true_reward and captures.
MethodRun run_method(const PlanningContext& ctx, const std::string& method, double budget,
                     const orienteering::SolveOptions& options = {});
// All methods in method_names() order.
std::vector<MethodRun> run_all(const PlanningContext& ctx, double budget,
                               const orienteering::SolveOptions& options = {});

baselines::BaselineConfig baseline_config(const PlanningContext& ctx, double budget);

// Orderings expected of the comparison; each entry is "ok: ..." or
// "FLAG: ...". Deviations are reported, never fatal.
std::vector<std::string> ordering_flags(const std::vector<MethodRun>& runs);

}  // namespace scanplan::harness
