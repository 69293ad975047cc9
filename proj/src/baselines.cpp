#include "scanplan/baselines.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "scanplan/errors.hpp"

namespace scanplan::baselines {

using orienteering::Walk;

std::vector<Vec3> overhead_polyline(const BaselineConfig& cfg) {
  std::vector<Vec3> pts;
  const Vec3& c = cfg.scene_center;
  for (int k = 0; k <= cfg.orbit_segments; ++k) {
    const double phi = 2.0 * kPi * (k % cfg.orbit_segments) / cfg.orbit_segments;
    pts.emplace_back(c.x() + cfg.orbit_radius * std::cos(phi),
                     c.y() + cfg.orbit_radius * std::sin(phi), cfg.orbit_height);
  }
  const double x0 = cfg.footprint.min.x();
  const double x1 = cfg.footprint.max.x();
  int row = 0;
  for (double y = cfg.footprint.min.y() + 0.5 * cfg.row_spacing;
       y <= cfg.footprint.max.y() + 1e-9; y += cfg.row_spacing, ++row) {
    const bool forward = row % 2 == 0;
    pts.emplace_back(forward ? x0 : x1, y, cfg.orbit_height);
    pts.emplace_back(forward ? x1 : x0, y, cfg.orbit_height);
  }
  return pts;
}

CameraPose look_toward(const Vec3& position, const Vec3& target, double fov_half_angle_deg) {
  const Vec3 d = target - position;
  const Vec3 look = d.norm() > 1e-12 ? Vec3(d.normalized()) : Vec3(0, 0, -1);
  return {position, look, fov_half_angle_deg};
}

Trajectory overhead_trajectory(const BaselineConfig& cfg, const scene::FreeSpaceGrid& free) {
  if (!(cfg.orbit_radius > 0.0 && cfg.row_spacing > 0.0 && cfg.image_spacing > 0.0) ||
      cfg.orbit_segments < 3) {
    throw ConfigError("overhead baseline needs positive radius, row spacing, image spacing");
  }
  const auto full = overhead_polyline(cfg);
  const std::size_t orbit_vertices = static_cast<std::size_t>(cfg.orbit_segments) + 1;
  const double down_fov = cfg.fov_half_angle_deg;
  auto pose_at = [&](const Vec3& p, bool on_orbit) {
    return on_orbit ? look_toward(p, cfg.scene_center, down_fov)
                    : CameraPose{p, Vec3(0, 0, -1), down_fov};
  };

  Trajectory t;
  t.method = "overhead";
  t.closed = false;
  t.poses.push_back(pose_at(full[0], true));
  double used = 0.0;
  for (std::size_t i = 0; i + 1 < full.size() && used < cfg.budget; ++i) {
    const double seg = (full[i + 1] - full[i]).norm();
    const bool on_orbit = i + 1 < orbit_vertices;
    const double take = std::min(seg, cfg.budget - used);
    const Vec3 end = take < seg ? Vec3(full[i] + (full[i + 1] - full[i]) * (take / seg)) : full[i + 1];
    t.poses.push_back(pose_at(end, on_orbit));
    used += take;
  }
  t.length = used;

  // Captures every image_spacing metres; orbit captures aim at the center.
  double orbit_length = 0.0;
  for (std::size_t i = 0; i + 1 < orbit_vertices; ++i) orbit_length += (full[i + 1] - full[i]).norm();
  const auto raw = orienteering::sample_captures(t.poses, cfg.image_spacing);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double along = static_cast<double>(k) * cfg.image_spacing;
    t.captures.push_back(pose_at(raw[k].position, along <= orbit_length + 1e-9));
  }

  for (std::size_t i = 0; i + 1 < t.poses.size(); ++i) {
    const Vec3& a = t.poses[i].position;
    const Vec3& b = t.poses[i + 1].position;
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / (0.25 * free.voxel_size()))));
    for (int s = 0; s <= steps; ++s) {
      const Vec3 p = a + (b - a) * (static_cast<double>(s) / steps);
      if (!free.point_free(p)) {
        throw NotInFreeSpace(
            fmt::format("overhead waypoint ({:.3f}, {:.3f}, {:.3f}) is not in free space", p.x(),
                        p.y(), p.z()));
      }
    }
  }
  return t;
}

std::vector<CameraPose> greedy_node_poses(const greedy::GreedyResult& result,
                                          const greedy::GroundSet& ground_set) {
  std::vector<CameraPose> out(ground_set.node_count);
  for (int node = 0; node < ground_set.node_count; ++node) {
    const int pose = result.selected[node];
    if (pose < 0) throw MissingNode(fmt::format("node {} has no selected orientation", node));
    out[node] = ground_set.poses[pose];
  }
  return out;
}

namespace {

Trajectory graph_trajectory(const PlanGraph& graph, const Walk& walk,
                            std::span<const CameraPose> node_poses, const std::string& method) {
  return orienteering::to_trajectory(graph, walk, node_poses, method);
}

}  // namespace

Trajectory random_trajectory(const PlanGraph& graph, const HopMetric& metric, double budget,
                             std::uint64_t seed, const Vec3& center, double fov_half_angle_deg) {
  const int limit = orienteering::budget_hops(budget, graph.spacing);
  std::mt19937_64 rng(seed);
  std::vector<char> visited(graph.size(), 0);
  visited[graph.root] = 1;
  Walk walk;
  walk.nodes.push_back(graph.root);
  int at = graph.root;
  std::vector<int> fits;
  while (true) {
    fits.clear();
    for (int u = 0; u < graph.size(); ++u) {
      if (visited[u] || metric(at, u) == HopMetric::kUnreachable) continue;
      if (walk.hops + metric(at, u) + metric(u, graph.root) <= limit) fits.push_back(u);
    }
    if (fits.empty()) break;
    const int u = fits[rng() % fits.size()];
    const auto leg = metric.path(at, u);
    for (std::size_t k = 1; k < leg.size(); ++k) {
      walk.nodes.push_back(leg[k]);
      visited[leg[k]] = 1;
    }
    walk.hops += metric(at, u);
    at = u;
  }
  if (at != graph.root) {
    const auto leg = metric.path(at, graph.root);
    walk.nodes.insert(walk.nodes.end(), leg.begin() + 1, leg.end());
    walk.hops += metric(at, graph.root);
  }
  std::vector<CameraPose> poses;
  for (int v = 0; v < graph.size(); ++v) {
    poses.push_back(look_toward(graph.positions[v], center, fov_half_angle_deg));
  }
  return graph_trajectory(graph, walk, poses, "random");
}

std::vector<int> approx_tsp_order(const HopMetric& metric, std::span<const int> nodes, int root) {
  std::vector<int> set(nodes.begin(), nodes.end());
  if (std::find(set.begin(), set.end(), root) == set.end()) set.push_back(root);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  const int n = static_cast<int>(set.size());
  const int r = static_cast<int>(std::find(set.begin(), set.end(), root) - set.begin());

  std::vector<int> parent(n, -1);
  std::vector<int> key(n, HopMetric::kUnreachable);
  std::vector<char> in_tree(n, 0);
  key[r] = 0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (!in_tree[i] && (u < 0 || key[i] < key[u])) u = i;
    }
    in_tree[u] = 1;
    for (int v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const int d = metric(set[u], set[v]);
      if (d < key[v]) {
        key[v] = d;
        parent[v] = u;
      }
    }
  }
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v) {
    if (parent[v] >= 0) children[parent[v]].push_back(v);
  }
  std::vector<int> order;
  std::vector<int> stack{r};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    order.push_back(set[u]);
    for (auto it = children[u].rbegin(); it != children[u].rend(); ++it) stack.push_back(*it);
  }
  return order;
}

int tour_hops(const HopMetric& metric, std::span<const int> order) {
  int sum = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sum += metric(order[i], order[(i + 1) % order.size()]);
  }
  return sum;
}

int mst_hops(const HopMetric& metric, std::span<const int> nodes, int root) {
  const auto order = approx_tsp_order(metric, nodes, root);
  // Recompute the tree weight with Prim over the same node set.
  const int n = static_cast<int>(order.size());
  std::vector<int> key(n, HopMetric::kUnreachable);
  std::vector<char> in_tree(n, 0);
  key[0] = 0;
  int total = 0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (!in_tree[i] && (u < 0 || key[i] < key[u])) u = i;
    }
    in_tree[u] = 1;
    total += key[u];
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v]) key[v] = std::min(key[v], metric(order[u], order[v]));
    }
  }
  return total;
}

namespace {

struct Candidate {
  int node = -1;
  double key = -1.0;
  coverage::RewardUnits gain = 0;
};

int cheapest_insertion(const HopMetric& metric, std::span<const int> order, int u) {
  int best = HopMetric::kUnreachable;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const int a = order[p];
    const int b = order[(p + 1) % order.size()];
    best = std::min(best, metric(a, u) + metric(u, b) - metric(a, b));
  }
  return best;
}

template <typename Pick>
Trajectory select_and_route(const PlanGraph& graph, const HopMetric& metric,
                            const coverage::CoverageModel& model,
                            std::span<const coverage::Footprint> fps,
                            std::span<const CameraPose> node_poses, double budget,
                            const std::string& method, Pick&& pick) {
  const int limit = orienteering::budget_hops(budget, graph.spacing);
  auto state = model.empty_state();
  model.apply(state, fps[graph.root]);
  std::vector<char> chosen(graph.size(), 0);
  chosen[graph.root] = 1;
  std::vector<int> selected{graph.root};
  std::vector<int> order{graph.root};
  while (true) {
    const Candidate c = pick(state, chosen, order, limit);
    if (c.node < 0) break;
    std::vector<int> trial = selected;
    trial.push_back(c.node);
    auto trial_order = approx_tsp_order(metric, trial, graph.root);
    if (tour_hops(metric, trial_order) > limit) break;
    selected = std::move(trial);
    order = std::move(trial_order);
    chosen[c.node] = 1;
    model.apply(state, fps[c.node]);
  }
  const Walk walk = orienteering::expand_tour(metric, order);
  return graph_trajectory(graph, walk, node_poses, method);
}

}  // namespace

Trajectory next_best_view(const PlanGraph& graph, const HopMetric& metric,
                          const coverage::CoverageModel& model,
                          std::span<const coverage::Footprint> fps,
                          std::span<const CameraPose> node_poses, double budget) {
  auto pick = [&](const coverage::CoverageState& state, const std::vector<char>& chosen,
                  const std::vector<int>&, int) {
    Candidate best;
    for (int u = 0; u < graph.size(); ++u) {
      if (chosen[u] || metric(graph.root, u) == HopMetric::kUnreachable) continue;
      const auto gain = model.gain_units(state, fps[u]);
      if (gain > 0 && gain > best.gain) best = {u, 0.0, gain};
    }
    return best;
  };
  return select_and_route(graph, metric, model, fps, node_poses, budget, "nbv", pick);
}

Trajectory ratio_greedy(const PlanGraph& graph, const HopMetric& metric,
                        const coverage::CoverageModel& model,
                        std::span<const coverage::Footprint> fps,
                        std::span<const CameraPose> node_poses, double budget) {
  auto pick = [&](const coverage::CoverageState& state, const std::vector<char>& chosen,
                  const std::vector<int>& order, int limit) {
    const int current = tour_hops(metric, order);
    Candidate best;
    for (int u = 0; u < graph.size(); ++u) {
      if (chosen[u] || metric(graph.root, u) == HopMetric::kUnreachable) continue;
      const int delta = cheapest_insertion(metric, order, u);
      if (current + delta > limit) continue;
      const auto gain = model.gain_units(state, fps[u]);
      if (gain <= 0) continue;
      const double key = delta == 0 ? std::numeric_limits<double>::infinity()
                                    : coverage::to_reward(gain) / delta;
      if (best.node < 0 || key > best.key || (key == best.key && gain > best.gain)) {
        best = {u, key, gain};
      }
    }
    return best;
  };
  return select_and_route(graph, metric, model, fps, node_poses, budget, "ratio", pick);
}

}  // namespace scanplan::baselines
