#include "scanplan/greedy.hpp"

#include <queue>

#include <json.hpp>

#include "scanplan/errors.hpp"

namespace scanplan::greedy {

std::vector<Vec3> downward_orientations(std::span<const double> ring_elevations_deg,
                                        int azimuths) {
  std::vector<Vec3> out{Vec3(0, 0, -1)};
  for (double elevation : ring_elevations_deg) {
    const double down = deg_to_rad(elevation);
    for (int a = 0; a < azimuths; ++a) {
      const double phi = 2.0 * kPi * a / azimuths;
      out.emplace_back(std::cos(down) * std::cos(phi), std::cos(down) * std::sin(phi),
                       -std::sin(down));
    }
  }
  return out;
}

std::vector<Vec3> default_orientations() {
  const double rings[] = {30.0, 60.0};
  return downward_orientations(rings, 8);
}

GroundSet GroundSet::cartesian(std::span<const Vec3> positions,
                               std::span<const Vec3> orientations,
                               double fov_half_angle_deg) {
  GroundSet gs;
  gs.orientations.assign(orientations.begin(), orientations.end());
  gs.node_count = static_cast<int>(positions.size());
  for (int node = 0; node < gs.node_count; ++node) {
    for (const auto& v : orientations) {
      gs.poses.push_back({positions[node], v.normalized(), fov_half_angle_deg});
      gs.node_of.push_back(node);
    }
  }
  return gs;
}

namespace {

void check_inputs(const GroundSet& gs, std::span<const Footprint> fps) {
  if (gs.poses.empty()) throw Error("ground set is empty");
  if (fps.size() != gs.poses.size()) throw Error("footprint table does not match ground set");
}

GreedyResult start_result(const GroundSet& gs) {
  GreedyResult r;
  r.selected.assign(gs.node_count, -1);
  return r;
}

void record(GreedyResult& r, const GroundSet& gs, int pose, RewardUnits gain) {
  r.selected[gs.node_of[pose]] = pose;
  r.permutation.push_back(pose);
  r.gain_units.push_back(gain);
  r.gains.push_back(coverage::to_reward(gain));
}

void finish(GreedyResult& r) {
  RewardUnits total = 0;
  for (auto g : r.gain_units) total += g;
  r.total_reward = coverage::to_reward(total);
}

}  // namespace

GreedyResult greedy_orientations(const GroundSet& gs, const CoverageModel& model,
                                 std::span<const Footprint> fps, const GreedyOptions& options) {
  check_inputs(gs, fps);
  GreedyResult result = start_result(gs);
  auto state = model.empty_state();

  struct Entry {
    RewardUnits bound;
    int pose;
    int stamp;  // selection round at which `bound` was computed
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.pose > b.pose;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
  for (int p = 0; p < static_cast<int>(gs.poses.size()); ++p) {
    queue.push({model.gain_units(state, fps[p]), p, 0});
    ++result.evaluations;
  }

  int round = 0;
  while (!queue.empty()) {
    Entry top = queue.top();
    queue.pop();
    if (result.selected[gs.node_of[top.pose]] >= 0) continue;  // node already taken
    if (top.stamp != round) {
      top.bound = model.gain_units(state, fps[top.pose]);
      top.stamp = round;
      ++result.evaluations;
      queue.push(top);
      continue;
    }
    if (options.gain_floor > 0.0 && coverage::to_reward(top.bound) < options.gain_floor) break;
    model.apply(state, fps[top.pose]);
    record(result, gs, top.pose, top.bound);
    ++round;
  }
  finish(result);
  return result;
}

GreedyResult greedy_orientations(const GroundSet& gs, const CoverageModel& model,
                                 const GreedyOptions& options) {
  const auto fps = model.footprints(gs.poses);
  return greedy_orientations(gs, model, fps, options);
}

GreedyResult naive_greedy(const GroundSet& gs, const CoverageModel& model,
                          std::span<const Footprint> fps, const GreedyOptions& options) {
  check_inputs(gs, fps);
  GreedyResult result = start_result(gs);
  auto state = model.empty_state();
  for (int step = 0; step < gs.node_count; ++step) {
    int best = -1;
    RewardUnits best_gain = -1;
    for (int p = 0; p < static_cast<int>(gs.poses.size()); ++p) {
      if (result.selected[gs.node_of[p]] >= 0) continue;
      const RewardUnits g = model.gain_units(state, fps[p]);
      ++result.evaluations;
      if (g > best_gain) {
        best_gain = g;
        best = p;
      }
    }
    if (best < 0) break;
    if (options.gain_floor > 0.0 && coverage::to_reward(best_gain) < options.gain_floor) break;
    model.apply(state, fps[best]);
    record(result, gs, best, best_gain);
  }
  finish(result);
  return result;
}

nlohmann::json to_json(const GreedyResult& result, const GroundSet& gs) {
  nlohmann::json perm = nlohmann::json::array();
  for (std::size_t k = 0; k < result.permutation.size(); ++k) {
    const int pose = result.permutation[k];
    const auto& c = gs.poses[pose];
    perm.push_back({{"pose", pose},
                    {"node", gs.node_of[pose]},
                    {"position", {c.position.x(), c.position.y(), c.position.z()}},
                    {"look_at", {c.look_at.x(), c.look_at.y(), c.look_at.z()}},
                    {"gain", result.gains[k]}});
  }
  return {{"total_reward", result.total_reward},
          {"evaluations", result.evaluations},
          {"nodes", gs.node_count},
          {"orientations_per_node", gs.orientations.size()},
          {"permutation", perm}};
}

}  // namespace scanplan::greedy
