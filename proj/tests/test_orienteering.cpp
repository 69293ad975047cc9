#include <doctest.h>

#include <random>

#include "scanplan/errors.hpp"
#include "scanplan/free_space.hpp"
#include "scanplan/orienteering.hpp"
#include "scanplan/pipeline.hpp"
#include "test_support.hpp"
#include "tiny_instances.hpp"

using namespace scanplan;
using namespace scanplan::orienteering;
using coverage::RewardUnits;
using scene::FreeSpaceGrid;

namespace {

constexpr RewardUnits kUnit = RewardUnits{1} << 32;

FreeSpaceGrid all_free(const Aabb& box, double voxel) {
  FreeSpaceGrid g(box, voxel, 0.0);
  const auto& d = g.dims();
  for (int i = 0; i < d[0]; ++i) {
    for (int j = 0; j < d[1]; ++j) {
      for (int k = 0; k < d[2]; ++k) g.set_free({i, j, k}, true);
    }
  }
  return g;
}

void check_walk(const PlanGraph& g, const Walk& w, double budget) {
  REQUIRE(!w.nodes.empty());
  CHECK(w.nodes.front() == g.root);
  CHECK(w.nodes.back() == g.root);
  CHECK(static_cast<int>(w.nodes.size()) == w.hops + 1);
  for (std::size_t i = 0; i + 1 < w.nodes.size(); ++i) CHECK(g.adjacent(w.nodes[i], w.nodes[i + 1]));
  CHECK(w.hops * g.spacing <= budget);
}

PlanGraph random_small_grid(std::mt19937_64& rng, int max_nodes) {
  while (true) {
    const int nx = 2 + static_cast<int>(rng() % 3);
    const int ny = 2 + static_cast<int>(rng() % 3);
    std::set<int> blocked;
    const int root = static_cast<int>(rng() % (nx * ny));
    for (int c = 0; c < nx * ny; ++c) {
      if (c != root && rng() % 5 == 0) blocked.insert(c);
    }
    auto g = testsupport::grid_graph(nx, ny, 1.0 + static_cast<double>(rng() % 3), root, blocked);
    if (g.size() < 2 || g.size() > max_nodes) continue;
    testsupport::random_rewards(g, rng);
    return g;
  }
}

}  // namespace

TEST_CASE("lattice in empty space") {
  const Aabb box(Vec3::Zero(), Vec3(10, 10, 10));
  const auto free = all_free(box, 1.0);
  CHECK(build_ground_positions(box, 5.0, free).points.size() == 27);
  CHECK(build_ground_positions(box, 25.0, free).points.size() == 1);
  CHECK_THROWS_AS(build_ground_positions(box, 5.0, FreeSpaceGrid(box, 1.0, 0.0)), EmptyGraph);
}

TEST_CASE("lattice around a cube obstacle equals a per-point clearance check") {
  const auto cube = testsupport::unit_cube(Vec3(4.5, 4.5, -0.5));
  const scene::Scene scene(cube);
  const Aabb box(Vec3::Zero(), Vec3(10, 10, 10));
  const auto free = scene::build_free_space(scene, box, 1.0, 2.0);
  const auto lattice = build_ground_positions(box, 1.0, free);
  std::size_t expected = 0;
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      for (int k = 0; k <= 10; ++k) {
        // The point's voxel center, clamped onto the grid at the far faces.
        const Vec3 c(std::min(i, 9) + 0.5, std::min(j, 9) + 0.5, std::min(k, 9) + 0.5);
        expected += testsupport::oracle_mesh_distance(cube, c) > 2.0 ? 1 : 0;
      }
    }
  }
  CHECK(lattice.points.size() == expected);
  CHECK(lattice.points.size() < 1331);
}

TEST_CASE("grid graph combinatorics") {
  const Aabb box(Vec3::Zero(), Vec3(20, 20, 1));
  auto free = all_free(box, 2.0);
  SUBCASE("3x3 free lattice") {
    const auto graph = build_graph(build_ground_positions(box, 10.0, free), free, Vec3::Zero());
    CHECK(graph.size() == 9);
    CHECK(graph.edge_count() == 12);
    CHECK(graph.spacing == 10.0);
  }
  SUBCASE("center occupied") {
    free.set_free({5, 5, 0}, false);
    const auto graph = build_graph(build_ground_positions(box, 10.0, free), free, Vec3::Zero());
    CHECK(graph.size() == 8);
    CHECK(graph.edge_count() == 8);
  }
  SUBCASE("disconnected part is dropped") {
    for (int j = 0; j < 10; ++j) free.set_free({3, j, 0}, false);
    const auto graph = build_graph(build_ground_positions(box, 10.0, free), free, Vec3::Zero());
    CHECK(graph.size() == 3);
  }
  SUBCASE("root away from every lattice point") {
    CHECK_THROWS_AS(build_graph(build_ground_positions(box, 10.0, free), free, Vec3(5, 5, 0)),
                    RootUnreachable);
  }
}

TEST_CASE("default blocks graph stays in free space") {
  const auto ctx = harness::prepare(harness::ExperimentConfig{});
  const auto& g = ctx->graph;
  CHECK(g.positions[g.root] == Vec3(-50, -50, 10));
  std::size_t edges = 0;
  for (int a = 0; a < g.size(); ++a) {
    CHECK(ctx->free.point_free(g.positions[a]));
    for (int b : g.neighbors[a]) {
      if (b < a) continue;
      ++edges;
      CHECK((g.positions[a] - g.positions[b]).norm() == doctest::Approx(g.spacing));
      // Sample the segment independently at a finer step than the builder.
      for (int s = 0; s <= 40; ++s) {
        CHECK(ctx->free.point_free(g.positions[a] + (g.positions[b] - g.positions[a]) * (s / 40.0)));
      }
    }
  }
  CHECK(edges == g.edge_count());
  CHECK(g.size() > 100);
}

TEST_CASE("attached rewards are the greedy gains") {
  const auto ctx = harness::prepare(harness::ExperimentConfig{});
  const auto& g = ctx->graph;
  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  CHECK(std::abs(surrogate(g, all) - ctx->greedy.total_reward) <= 1e-9);
  for (int v = 0; v < g.size(); ++v) CHECK(g.rewards[v] >= 0.0);

  // Prefixes of the greedy order are exact.
  std::vector<int> prefix;
  std::vector<const coverage::Footprint*> fps;
  for (int pose : ctx->greedy.permutation) {
    const int node = ctx->ground_set.node_of[pose];
    prefix.push_back(node);
    fps.push_back(&ctx->footprints[pose]);
    CHECK(std::abs(surrogate(g, prefix) - ctx->model->evaluate(fps)) <= 1e-9);
  }

  // Arbitrary subsets are underestimated.
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> subset;
    std::vector<const coverage::Footprint*> sub_fps;
    const auto p = 1 + rng() % 60;
    for (int v = 0; v < g.size(); ++v) {
      if (rng() % 100 >= p) continue;
      subset.push_back(v);
      sub_fps.push_back(&ctx->node_footprints[v]);
    }
    CHECK(surrogate(g, subset) <= ctx->model->evaluate(sub_fps) + 1e-9);
  }

  auto partial = ctx->greedy;
  for (std::size_t k = partial.permutation.size(); k-- > 0;) {
    if (ctx->ground_set.node_of[partial.permutation[k]] != 3) continue;
    partial.permutation.erase(partial.permutation.begin() + static_cast<std::ptrdiff_t>(k));
    partial.gain_units.erase(partial.gain_units.begin() + static_cast<std::ptrdiff_t>(k));
  }
  auto graph = build_graph(ctx->lattice, ctx->free, ctx->config.root);
  CHECK_THROWS_AS(attach_rewards(graph, partial, ctx->ground_set), MissingNode);
}

TEST_CASE("budget zero gives the root alone") {
  std::mt19937_64 rng(1);
  auto g = testsupport::grid_graph(3, 3, 1.0, 4);
  testsupport::random_rewards(g, rng);
  for (auto backend : {Backend::exact, Backend::heuristic}) {
    const auto w = solve_orienteering(g, 0.0, backend);
    CHECK(w.nodes == std::vector<int>{g.root});
    CHECK(surrogate_units(g, w.nodes) == g.reward_units[g.root]);
  }
  CHECK_THROWS_AS(solve_orienteering(g, -1.0, Backend::heuristic), ConfigError);
}

TEST_CASE("ample budget collects every reward") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_small_grid(rng, 12);
    const double budget = 2.0 * g.edge_count() * g.spacing;
    RewardUnits total = 0;
    for (auto u : g.reward_units) total += u;
    for (auto backend : {Backend::exact, Backend::heuristic}) {
      const auto w = solve_orienteering(g, budget, backend);
      check_walk(g, w, budget);
      CHECK(surrogate_units(g, w.nodes) == total);
    }
  }
}

TEST_CASE("exact backend on a path graph prefers the richer side") {
  auto g = testsupport::grid_graph(3, 1, 1.0, 1);  // nodes 0 - 1(root) - 2
  g.set_rewards({5 * kUnit, 2 * kUnit, 1 * kUnit});
  const auto w = exact_backend(g, 2.0);
  check_walk(g, w, 2.0);
  CHECK(w.nodes == std::vector<int>{1, 0, 1});
  CHECK(surrogate(g, w.nodes) == 7.0);
  CHECK(w.optimality_gap == 0.0);
  CHECK(surrogate(g, exact_backend(g, 4.0).nodes) == 8.0);
}

TEST_CASE("symmetric rewards have a unique optimal value") {
  auto g = testsupport::grid_graph(3, 1, 1.0, 1);
  g.set_rewards({kUnit, 0, kUnit});
  const auto a = exact_backend(g, 2.0);
  CHECK(surrogate_units(g, a.nodes) == kUnit);
  CHECK(surrogate_units(g, heuristic_backend(g, 2.0).nodes) == kUnit);
}

TEST_CASE("exact backend equals exhaustive walk enumeration") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_small_grid(rng, 8);
    const int hops = static_cast<int>(rng() % 11);
    const double budget = hops * g.spacing + 0.5 * g.spacing * static_cast<double>(rng() % 2);
    const auto w = exact_backend(g, budget);
    check_walk(g, w, budget);
    CHECK(surrogate_units(g, w.nodes) == testsupport::enumerate_walks(g, budget_hops(budget, g.spacing)));
  }
}

TEST_CASE("exact backend rejects large graphs") {
  const auto g = testsupport::grid_graph(4, 4, 1.0, 0);
  CHECK_THROWS_AS(exact_backend(g, 10.0), TooLarge);
}

TEST_CASE("heuristic is within 0.9 of exact on the 3x3 grid with budget 6") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    auto g = testsupport::grid_graph(3, 3, 1.0, 0);
    testsupport::random_rewards(g, rng);
    const auto h = heuristic_backend(g, 6.0);
    const auto e = exact_backend(g, 6.0);
    check_walk(g, h, 6.0);
    CHECK(static_cast<double>(surrogate_units(g, h.nodes)) >=
          0.9 * static_cast<double>(surrogate_units(g, e.nodes)));
  }
}

TEST_CASE("one rewarding far node is visited iff the round trip fits") {
  auto g = testsupport::grid_graph(6, 1, 2.0, 0);
  std::vector<RewardUnits> u(g.size(), 0);
  u[5] = kUnit;
  g.set_rewards(u);
  const double d = 10.0;
  for (double budget : {19.0, 19.99, 20.0, 24.0}) {
    const auto w = heuristic_backend(g, budget);
    check_walk(g, w, budget);
    const bool visited = std::find(w.nodes.begin(), w.nodes.end(), 5) != w.nodes.end();
    CHECK(visited == (2 * d <= budget));
  }
}

TEST_CASE("equal rewards stay within budget") {
  auto g = testsupport::grid_graph(7, 7, 10.0, 24);
  g.set_rewards(std::vector<RewardUnits>(g.size(), kUnit));
  for (double budget : {0.0, 10.0, 40.0, 95.0, 200.0, 960.0}) {
    const auto w = heuristic_backend(g, budget);
    check_walk(g, w, budget);
  }
}

TEST_CASE("exact reward is monotone in budget") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_small_grid(rng, 12);
    RewardUnits last = 0;
    for (int hops = 0; hops <= 14; ++hops) {
      const auto r = surrogate_units(g, exact_backend(g, hops * g.spacing).nodes);
      CHECK(r >= last);
      last = r;
    }
  }
}

TEST_CASE("expand_tour follows shortest paths") {
  const auto g = testsupport::grid_graph(3, 3, 1.0, 0);
  const HopMetric metric(g);
  CHECK(metric(0, 8) == 4);
  const std::vector<int> targets{0, 8};
  const auto w = expand_tour(metric, targets);
  CHECK(w.hops == 8);
  check_walk(g, w, 8.0);
}

TEST_CASE("captures every spacing along a polyline") {
  std::vector<coverage::CameraPose> verts{{Vec3(0, 0, 0), Vec3(0, 0, -1), 45},
                                          {Vec3(10, 0, 0), Vec3(1, 0, 0), 45},
                                          {Vec3(10, 10, 0), Vec3(0, 1, 0), 45}};
  const auto caps = sample_captures(verts, 3.5);
  CHECK(caps.size() == 6);  // floor(20 / 3.5) + 1
  for (std::size_t k = 1; k < caps.size(); ++k) {
    const double along = caps[k].position.x() + caps[k].position.y();
    CHECK(along == doctest::Approx(3.5 * k));
  }
  CHECK(caps[2].look_at == Vec3(0, 0, -1));
  CHECK(caps[3].look_at == Vec3(1, 0, 0));
}

TEST_CASE("validation catches broken trajectories") {
  auto g = testsupport::grid_graph(3, 3, 1.0, 0);
  std::vector<coverage::CameraPose> poses(g.size());
  const Walk ok{{0, 1, 0}, 2, std::nullopt};
  auto t = to_trajectory(g, ok, poses, "t");
  CHECK(validate(t, g, 2.0).empty());
  CHECK_FALSE(validate(t, g, 1.5).empty());
  t.nodes = {0, 4, 0};
  CHECK_FALSE(validate(t, g, 10.0).empty());
  t.nodes = {0, 1};
  CHECK_FALSE(validate(t, g, 10.0).empty());
}

TEST_CASE("every solver trajectory on the bundled scene is valid and underestimates") {
  const auto ctx = harness::prepare(harness::ExperimentConfig{});
  for (double budget : {0.0, 240.0, 960.0}) {
    const auto run = harness::run_method(*ctx, "ours", budget);
    CHECK(validate(run.trajectory, ctx->graph, budget).empty());
    CHECK(run.trajectory.true_reward >= run.trajectory.surrogate_reward - 1e-9);
    CHECK(run.trajectory.length <= budget);
  }
}
