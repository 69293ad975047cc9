#include "scanplan/orienteering.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "scanplan/errors.hpp"
#include "scanplan/ilp.hpp"

namespace scanplan::orienteering {

Lattice build_ground_positions(const Aabb& bbox, double spacing,
                               const scene::FreeSpaceGrid& free) {
  if (!(spacing > 0.0)) throw ConfigError("lattice spacing must be positive");
  Lattice lattice;
  lattice.origin = bbox.min;
  lattice.spacing = spacing;
  const Vec3 extent = bbox.extent();
  for (int axis = 0; axis < 3; ++axis) {
    lattice.dims[axis] =
        extent[axis] < 0.0 ? 0 : static_cast<int>(std::floor(extent[axis] / spacing + 1e-9)) + 1;
  }
  for (int i = 0; i < lattice.dims[0]; ++i) {
    for (int j = 0; j < lattice.dims[1]; ++j) {
      for (int k = 0; k < lattice.dims[2]; ++k) {
        const Vec3 p = bbox.min + spacing * Vec3(i, j, k);
        if (!free.point_free(p)) continue;
        lattice.points.push_back(p);
        lattice.cells.push_back({i, j, k});
      }
    }
  }
  if (lattice.points.empty()) throw EmptyGraph("no lattice point lies in free space");
  return lattice;
}

std::size_t PlanGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& n : neighbors) twice += n.size();
  return twice / 2;
}

bool PlanGraph::adjacent(int a, int b) const {
  const auto& n = neighbors[a];
  return std::binary_search(n.begin(), n.end(), b);
}

void PlanGraph::set_rewards(std::vector<RewardUnits> units) {
  reward_units = std::move(units);
  rewards.resize(reward_units.size());
  for (std::size_t i = 0; i < reward_units.size(); ++i) {
    rewards[i] = coverage::to_reward(reward_units[i]);
  }
}

PlanGraph build_graph(const Lattice& lattice, const scene::FreeSpaceGrid& free,
                      const Vec3& root_position) {
  const int n = static_cast<int>(lattice.points.size());
  if (n == 0) throw EmptyGraph("lattice is empty");
  std::map<LatticeCell, int> id_of;
  for (int i = 0; i < n; ++i) id_of[lattice.cells[i]] = i;

  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      LatticeCell next = lattice.cells[i];
      ++next[axis];
      const auto it = id_of.find(next);
      if (it == id_of.end()) continue;
      if (!free.segment_free(lattice.points[i], lattice.points[it->second])) continue;
      adj[i].push_back(it->second);
      adj[it->second].push_back(i);
    }
  }

  // Root: nearest lattice point, accepted within one voxel per axis.
  int root = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec3 d = lattice.points[i] - root_position;
    if (d.cwiseAbs().maxCoeff() > free.voxel_size() + 1e-9) continue;
    if (d.norm() < best) {
      best = d.norm();
      root = i;
    }
  }
  if (root < 0) {
    throw RootUnreachable(fmt::format("root ({}, {}, {}) is not near any free lattice point",
                                      root_position.x(), root_position.y(), root_position.z()));
  }

  std::vector<int> remap(n, -1);
  std::deque<int> frontier{root};
  remap[root] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : adj[u]) {
      if (remap[v] < 0) {
        remap[v] = 0;
        frontier.push_back(v);
      }
    }
  }
  PlanGraph graph;
  graph.spacing = lattice.spacing;
  int next_id = 0;
  for (int i = 0; i < n; ++i) {
    if (remap[i] < 0) continue;
    remap[i] = next_id++;
    graph.positions.push_back(lattice.points[i]);
    graph.cells.push_back(lattice.cells[i]);
  }
  graph.neighbors.resize(next_id);
  for (int i = 0; i < n; ++i) {
    if (remap[i] < 0) continue;
    for (int v : adj[i]) graph.neighbors[remap[i]].push_back(remap[v]);
    std::sort(graph.neighbors[remap[i]].begin(), graph.neighbors[remap[i]].end());
  }
  graph.root = remap[root];
  graph.set_rewards(std::vector<RewardUnits>(next_id, 0));
  return graph;
}

PlanGraph attach_rewards(PlanGraph graph, const greedy::GreedyResult& result,
                         const greedy::GroundSet& ground_set) {
  std::vector<RewardUnits> units(graph.size(), -1);
  for (std::size_t k = 0; k < result.permutation.size(); ++k) {
    const int node = ground_set.node_of[result.permutation[k]];
    if (node < graph.size()) units[node] = result.gain_units[k];
  }
  for (int i = 0; i < graph.size(); ++i) {
    if (units[i] < 0) throw MissingNode(fmt::format("graph node {} has no greedy gain", i));
  }
  graph.set_rewards(std::move(units));
  return graph;
}

HopMetric::HopMetric(const PlanGraph& graph) : n_(graph.size()) {
  dist_.assign(static_cast<std::size_t>(n_) * n_, kUnreachable);
  parent_.assign(static_cast<std::size_t>(n_) * n_, -1);
  std::vector<int> queue(n_);
  for (int s = 0; s < n_; ++s) {
    int head = 0;
    int tail = 0;
    queue[tail++] = s;
    dist_[index(s, s)] = 0;
    while (head < tail) {
      const int u = queue[head++];
      for (int v : graph.neighbors[u]) {
        if (dist_[index(s, v)] != kUnreachable) continue;
        dist_[index(s, v)] = dist_[index(s, u)] + 1;
        parent_[index(s, v)] = u;
        queue[tail++] = v;
      }
    }
  }
}

std::vector<int> HopMetric::path(int a, int b) const {
  if (dist_[index(a, b)] == kUnreachable) throw Error("no path between nodes");
  std::vector<int> out{b};
  while (out.back() != a) out.push_back(parent_[index(a, out.back())]);
  std::reverse(out.begin(), out.end());
  return out;
}

int budget_hops(double budget, double spacing) {
  if (!(budget >= 0.0)) return -1;
  return static_cast<int>(std::floor(budget / spacing + 1e-9));
}

RewardUnits surrogate_units(const PlanGraph& graph, std::span<const int> nodes) {
  std::vector<char> seen(graph.size(), 0);
  RewardUnits sum = 0;
  for (int v : nodes) {
    if (seen[v]) continue;
    seen[v] = 1;
    sum += graph.reward_units[v];
  }
  return sum;
}

double surrogate(const PlanGraph& graph, std::span<const int> nodes) {
  return coverage::to_reward(surrogate_units(graph, nodes));
}

Walk expand_tour(const HopMetric& metric, std::span<const int> targets) {
  Walk walk;
  walk.nodes.push_back(targets[0]);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const int a = targets[i];
    const int b = targets[(i + 1) % targets.size()];
    if (a == b) continue;
    const auto leg = metric.path(a, b);
    walk.nodes.insert(walk.nodes.end(), leg.begin() + 1, leg.end());
    walk.hops += static_cast<int>(leg.size()) - 1;
  }
  return walk;
}

// --- exact ---------------------------------------------------------------

Walk exact_backend(const PlanGraph& graph, double budget) {
  if (graph.size() > kExactMaxNodes) {
    throw TooLarge(fmt::format("exact backend supports at most {} nodes, got {}", kExactMaxNodes,
                               graph.size()));
  }
  const HopMetric metric(graph);
  const int limit = budget_hops(budget, graph.spacing);
  const int root = graph.root;
  std::vector<int> others;
  for (int v = 0; v < graph.size(); ++v) {
    if (v != root && metric(root, v) != HopMetric::kUnreachable) others.push_back(v);
  }
  const int k = static_cast<int>(others.size());
  const std::size_t masks = std::size_t{1} << k;
  constexpr int kInf = HopMetric::kUnreachable;
  // best[mask][i]: fewest hops from the root visiting `mask`, ending at others[i].
  std::vector<int> best(masks * std::max(k, 1), kInf);
  std::vector<int> prev(masks * std::max(k, 1), -1);
  auto at = [k](std::size_t mask, int i) { return mask * k + i; };
  for (int i = 0; i < k; ++i) best[at(std::size_t{1} << i, i)] = metric(root, others[i]);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    for (int i = 0; i < k; ++i) {
      const int here = best[at(mask, i)];
      if (!(mask >> i & 1) || here >= kInf || here > limit) continue;
      for (int j = 0; j < k; ++j) {
        if (mask >> j & 1) continue;
        const std::size_t next = mask | (std::size_t{1} << j);
        const int cost = here + metric(others[i], others[j]);
        if (cost < best[at(next, j)]) {
          best[at(next, j)] = cost;
          prev[at(next, j)] = i;
        }
      }
    }
  }

  RewardUnits best_reward = graph.reward_units[root];
  int best_len = 0;
  std::size_t best_mask = 0;
  int best_end = -1;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    int len = kInf;
    int end = -1;
    for (int i = 0; i < k; ++i) {
      if (!(mask >> i & 1) || best[at(mask, i)] >= kInf) continue;
      const int closed = best[at(mask, i)] + metric(others[i], root);
      if (closed < len) {
        len = closed;
        end = i;
      }
    }
    if (end < 0 || len > limit) continue;
    RewardUnits reward = graph.reward_units[root];
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1) reward += graph.reward_units[others[i]];
    }
    if (reward > best_reward || (reward == best_reward && len < best_len)) {
      best_reward = reward;
      best_len = len;
      best_mask = mask;
      best_end = end;
    }
  }

  std::vector<int> targets;
  for (std::size_t mask = best_mask; best_end >= 0;) {
    targets.push_back(others[best_end]);
    const int p = prev[at(mask, best_end)];
    mask &= ~(std::size_t{1} << best_end);
    best_end = p;
  }
  targets.push_back(root);
  std::reverse(targets.begin(), targets.end());
  Walk walk = expand_tour(metric, targets);
  walk.optimality_gap = 0.0;
  return walk;
}

// --- heuristic -----------------------------------------------------------

namespace {

class TourSearch {
 public:
  TourSearch(const PlanGraph& graph, const HopMetric& metric, int limit)
      : graph_(graph), metric_(metric), limit_(limit) {}

  struct Tour {
    std::vector<int> targets;
    int hops = 0;
    RewardUnits reward = 0;
    std::vector<char> visited;
  };

  Tour make(std::vector<int> targets) const {
    Tour t;
    t.targets = std::move(targets);
    refresh(t);
    return t;
  }

  void refresh(Tour& t) const {
    const Walk w = expand_tour(metric_, t.targets);
    t.hops = w.hops;
    t.visited.assign(graph_.size(), 0);
    t.reward = 0;
    for (int v : w.nodes) {
      if (!t.visited[v]) {
        t.visited[v] = 1;
        t.reward += graph_.reward_units[v];
      }
    }
  }

  // Repeatedly inserts the unvisited node with the best reward per added hop.
  void insert_greedy(Tour& t) const {
    while (true) {
      int best_node = -1;
      std::size_t best_pos = 0;
      double best_key = -1.0;
      const std::size_t k = t.targets.size();
      for (int u = 0; u < graph_.size(); ++u) {
        if (t.visited[u] || graph_.reward_units[u] <= 0) continue;
        if (metric_(graph_.root, u) == HopMetric::kUnreachable) continue;
        int delta = HopMetric::kUnreachable;
        std::size_t pos = 0;
        for (std::size_t p = 0; p < k; ++p) {
          const int a = t.targets[p];
          const int b = t.targets[(p + 1) % k];
          const int d = metric_(a, u) + metric_(u, b) - metric_(a, b);
          if (d < delta) {
            delta = d;
            pos = p;
          }
        }
        if (t.hops + delta > limit_) continue;
        const double key = delta == 0 ? std::numeric_limits<double>::infinity()
                                      : graph_.rewards[u] / delta;
        const bool better =
            best_node < 0 || key > best_key ||
            (key == best_key && graph_.reward_units[u] > graph_.reward_units[best_node]);
        if (better) {
          best_node = u;
          best_pos = pos;
          best_key = key;
        }
      }
      if (best_node < 0) return;
      t.targets.insert(t.targets.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1, best_node);
      refresh(t);
    }
  }

  // First-improvement 2-opt on the target order; the root stays first.
  void two_opt(Tour& t) const {
    bool improved = true;
    while (improved) {
      improved = false;
      const std::size_t k = t.targets.size();
      for (std::size_t i = 1; i + 1 < k && !improved; ++i) {
        for (std::size_t j = i + 1; j < k && !improved; ++j) {
          const int a = t.targets[i - 1];
          const int b = t.targets[i];
          const int c = t.targets[j];
          const int d = t.targets[(j + 1) % k];
          const int delta = metric_(a, c) + metric_(b, d) - metric_(a, b) - metric_(c, d);
          if (delta >= 0) continue;
          Tour trial = t;
          std::reverse(trial.targets.begin() + static_cast<std::ptrdiff_t>(i),
                       trial.targets.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          refresh(trial);
          if (trial.reward >= t.reward && trial.hops < t.hops) {
            t = std::move(trial);
            improved = true;
          }
        }
      }
    }
  }

  // Drop one target, refill greedily; keep the change if it collects more.
  bool reinsertion_pass(Tour& t) const {
    for (std::size_t i = 1; i < t.targets.size(); ++i) {
      std::vector<int> targets = t.targets;
      targets.erase(targets.begin() + static_cast<std::ptrdiff_t>(i));
      Tour trial = make(std::move(targets));
      two_opt(trial);
      insert_greedy(trial);
      two_opt(trial);
      if (trial.reward > t.reward || (trial.reward == t.reward && trial.hops < t.hops)) {
        t = std::move(trial);
        return true;
      }
    }
    return false;
  }

 private:
  const PlanGraph& graph_;
  const HopMetric& metric_;
  int limit_;
};

}  // namespace

Walk heuristic_backend(const PlanGraph& graph, double budget) {
  const HopMetric metric(graph);
  const int limit = budget_hops(budget, graph.spacing);
  TourSearch search(graph, metric, std::max(limit, 0));
  auto improve = [&](TourSearch::Tour tour) {
    while (true) {
      const auto before = tour.reward;
      search.insert_greedy(tour);
      search.two_opt(tour);
      search.insert_greedy(tour);
      if (tour.reward == before) break;
    }
    constexpr int kMaxPasses = 200;
    for (int pass = 0; pass < kMaxPasses && search.reinsertion_pass(tour); ++pass) {
    }
    return tour;
  };

  auto best = search.make({graph.root});
  if (limit <= 0) return expand_tour(metric, best.targets);
  best = improve(std::move(best));

  // Restarts each force one target in first, ranked by reward per round-trip hop.
  constexpr std::size_t kRestarts = 8;
  std::vector<std::pair<double, int>> seeds;
  for (int u = 0; u < graph.size(); ++u) {
    const int trip = metric(graph.root, u);
    if (u == graph.root || trip == HopMetric::kUnreachable || 2 * trip > limit) continue;
    if (graph.reward_units[u] <= 0) continue;
    seeds.emplace_back(-graph.rewards[u] / (2.0 * trip), u);
  }
  std::sort(seeds.begin(), seeds.end());
  if (seeds.size() > kRestarts) seeds.resize(kRestarts);
  for (const auto& [key, u] : seeds) {
    auto tour = improve(search.make({graph.root, u}));
    if (tour.reward > best.reward || (tour.reward == best.reward && tour.hops < best.hops)) {
      best = std::move(tour);
    }
  }
  return expand_tour(metric, best.targets);
}

Backend parse_backend(const std::string& name) {
  if (name == "exact") return Backend::exact;
  if (name == "heuristic") return Backend::heuristic;
  if (name == "ilp_export") return Backend::ilp_export;
  throw ConfigError("unknown backend '" + name + "'");
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::exact: return "exact";
    case Backend::heuristic: return "heuristic";
    case Backend::ilp_export: return "ilp_export";
  }
  return "?";
}

Walk solve_orienteering(const PlanGraph& graph, double budget, Backend backend,
                        const SolveOptions& options) {
  if (!(budget >= 0.0)) throw ConfigError("budget must be non-negative");
  switch (backend) {
    case Backend::exact: return exact_backend(graph, budget);
    case Backend::heuristic: return heuristic_backend(graph, budget);
    case Backend::ilp_export: {
      if (options.solution_path.empty()) {
        throw ConfigError("ilp_export backend needs a solver assignment file (--solution)");
      }
      std::ifstream in(options.solution_path);
      if (!in) throw FileNotFound(options.solution_path);
      const auto model =
          ilp::export_ilp(graph, budget, options.ilp_closure ? ilp::ArcSet::closure : ilp::ArcSet::edges);
      return ilp::to_graph_walk(graph, model, ilp::decode(model, ilp::read_assignment(in)));
    }
  }
  throw Error("unreachable backend");
}

std::vector<CameraPose> Trajectory::unique_poses() const {
  if (nodes.empty()) return captures;
  std::vector<CameraPose> out;
  std::vector<int> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), nodes[i]) != seen.end()) continue;
    seen.push_back(nodes[i]);
    out.push_back(poses[i]);
  }
  return out;
}

Trajectory to_trajectory(const PlanGraph& graph, const Walk& walk,
                         std::span<const CameraPose> node_poses, std::string method) {
  Trajectory t;
  t.method = std::move(method);
  t.nodes = walk.nodes;
  for (int v : walk.nodes) t.poses.push_back(node_poses[v]);
  t.length = walk.hops * graph.spacing;
  t.surrogate_reward = surrogate(graph, walk.nodes);
  t.closed = true;
  t.optimality_gap = walk.optimality_gap;
  return t;
}

std::vector<CameraPose> sample_captures(std::span<const CameraPose> vertices, double spacing) {
  std::vector<CameraPose> out;
  if (vertices.empty()) return out;
  out.push_back(vertices.front());
  double carried = 0.0;  // distance travelled since the last capture
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const Vec3& a = vertices[i].position;
    const Vec3& b = vertices[i + 1].position;
    const double len = (b - a).norm();
    double s = spacing - carried;
    while (s <= len + 1e-9) {
      CameraPose pose = vertices[i];
      pose.position = a + (b - a) * (len > 0.0 ? std::min(1.0, s / len) : 0.0);
      out.push_back(pose);
      s += spacing;
    }
    carried = len - (s - spacing);
  }
  return out;
}

std::string validate(const Trajectory& t, const PlanGraph& graph, double budget) {
  if (t.length > budget + 1e-9 * std::max(1.0, budget)) {
    return fmt::format("length {} exceeds budget {}", t.length, budget);
  }
  if (t.nodes.empty()) return {};
  if (t.nodes.front() != graph.root || t.nodes.back() != graph.root) return "walk not closed at root";
  for (std::size_t i = 0; i + 1 < t.nodes.size(); ++i) {
    if (!graph.adjacent(t.nodes[i], t.nodes[i + 1])) {
      return fmt::format("nodes {} and {} are not adjacent", t.nodes[i], t.nodes[i + 1]);
    }
  }
  const int hops = static_cast<int>(t.nodes.size()) - 1;
  if (hops > budget_hops(budget, graph.spacing)) return "hop count exceeds budget";
  if (hops * graph.spacing != t.length) return "length disagrees with hop count";
  if (t.poses.size() != t.nodes.size()) return "pose count disagrees with node count";
  return {};
}

}  // namespace scanplan::orienteering
