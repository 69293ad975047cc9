#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scanplan/coverage.hpp"
#include "scanplan/free_space.hpp"
#include "scanplan/greedy.hpp"

namespace scanplan::orienteering {

using coverage::CameraPose;
using coverage::RewardUnits;
using LatticeCell = std::array<int, 3>;

struct Lattice {
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  LatticeCell dims{0, 0, 0};
  std::vector<Vec3> points;  // free lattice points only
  std::vector<LatticeCell> cells;
};

// Lattice points bbox.min + spacing * (i, j, k), floor(extent / spacing) + 1
// per axis, kept where the free-space grid is free. Throws EmptyGraph.
Lattice build_ground_positions(const Aabb& bbox, double spacing,
                               const scene::FreeSpaceGrid& free);

struct PlanGraph {
  double spacing = 1.0;  // every edge has this length
  std::vector<Vec3> positions;
  std::vector<LatticeCell> cells;
  std::vector<std::vector<int>> neighbors;  // ascending ids
  std::vector<RewardUnits> reward_units;
  std::vector<double> rewards;
  int root = 0;

  int size() const { return static_cast<int>(positions.size()); }
  std::size_t edge_count() const;
  bool adjacent(int a, int b) const;
  void set_rewards(std::vector<RewardUnits> units);
};

// 6-connected grid graph over the lattice; an edge survives only if its
// segment stays in free voxels. Restricted to the root's component.
PlanGraph build_graph(const Lattice& lattice, const scene::FreeSpaceGrid& free,
                      const Vec3& root_position);

// Node i's reward is the marginal gain recorded when greedy selected the
// pose at node i. Ground-set node ids must equal graph node ids.
PlanGraph attach_rewards(PlanGraph graph, const greedy::GreedyResult& result,
                         const greedy::GroundSet& ground_set);

// All-pairs hop distances with deterministic shortest paths (BFS visiting
// neighbors in ascending id order).
class HopMetric {
 public:
  static constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

  explicit HopMetric(const PlanGraph& graph);
  int operator()(int a, int b) const { return dist_[index(a, b)]; }
  // Node sequence a..b inclusive.
  std::vector<int> path(int a, int b) const;

 private:
  std::size_t index(int a, int b) const { return static_cast<std::size_t>(a) * n_ + b; }
  int n_ = 0;
  std::vector<int> dist_;
  std::vector<int> parent_;
};

// Largest number of edges a walk may use under `budget`.
int budget_hops(double budget, double spacing);

// Closed walk through the root: nodes.front() == nodes.back() == root.
struct Walk {
  std::vector<int> nodes;
  int hops = 0;
  std::optional<double> optimality_gap;  // 0 for proven optima
};

RewardUnits surrogate_units(const PlanGraph& graph, std::span<const int> nodes);
double surrogate(const PlanGraph& graph, std::span<const int> nodes);

// Expands a cyclic sequence of target nodes (starting at the root) into a
// closed walk along shortest paths.
Walk expand_tour(const HopMetric& metric, std::span<const int> targets);

inline constexpr int kExactMaxNodes = 12;

// Optimal walk by dynamic programming over (visited set, last node) with
// minimal hop counts. Throws TooLarge above kExactMaxNodes nodes.
Walk exact_backend(const PlanGraph& graph, double budget);

// Ratio-driven cheapest insertion, 2-opt, then re-insertion passes.
Walk heuristic_backend(const PlanGraph& graph, double budget);

enum class Backend { exact, heuristic, ilp_export };
Backend parse_backend(const std::string& name);
std::string to_string(Backend backend);

struct SolveOptions {
  // ilp_export: solver assignment file to decode, and whether the model it
  // solves was exported over the metric closure or the grid edges.
  std::string solution_path;
  bool ilp_closure = true;
};

Walk solve_orienteering(const PlanGraph& graph, double budget, Backend backend,
                        const SolveOptions& options = {});

struct Trajectory {
  std::string method;
  std::vector<int> nodes;  // closed node walk; empty for off-graph paths
  std::vector<CameraPose> poses;  // one per path vertex
  double length = 0.0;
  double surrogate_reward = 0.0;
  double true_reward = 0.0;
  bool closed = true;
  std::vector<CameraPose> captures;
  std::optional<double> optimality_gap;

  // Poses at the distinct nodes, in first-visit order.
  std::vector<CameraPose> unique_poses() const;
};

Trajectory to_trajectory(const PlanGraph& graph, const Walk& walk,
                         std::span<const CameraPose> node_poses, std::string method);

// Poses every `spacing` metres along the polyline, starting at the first
// vertex; each takes the orientation of its segment's start vertex.
std::vector<CameraPose> sample_captures(std::span<const CameraPose> vertices, double spacing);

// Empty string when valid, otherwise the first violation found.
std::string validate(const Trajectory& trajectory, const PlanGraph& graph, double budget);

}  // namespace scanplan::orienteering
