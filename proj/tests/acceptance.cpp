// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit on
// any FAIL. Tolerances and instance counts are pinned below.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "scanplan/config.hpp"
#include "scanplan/greedy.hpp"
#include "scanplan/ilp.hpp"
#include "scanplan/orienteering.hpp"
#include "scanplan/pipeline.hpp"
#include "test_support.hpp"
#include "tiny_instances.hpp"

using namespace scanplan;
namespace fs = std::filesystem;

namespace {

constexpr int kSubmodularTriples = 10'000;
constexpr double kSubmodularSeconds = 60.0;
constexpr int kApproxInstances = 50;
constexpr double kApproxRatio = 0.5;
constexpr int kLazyInstances = 20;
constexpr double kPrefixTolerance = 1e-9;
constexpr int kSurrogateSubsets = 200;
constexpr double kDominanceTolerance = 1e-9;
constexpr int kHeuristicInstances = 50;
constexpr int kHeuristicMaxNodes = 12;
constexpr double kHeuristicRatio = 0.9;
constexpr int kEnumerationInstances = 50;
constexpr int kEnumerationMaxNodes = 8;
constexpr int kRoundTripInstances = 40;
constexpr int kSolverInstances = 20;
constexpr double kSweepSeconds = 30.0 * 60.0;
constexpr double kWaypointTarget = 275.0;
constexpr double kWaypointTolerance = 0.10;

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict = Verdict::pass;
  std::string detail;
};

// Collects the first few violations of one criterion.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(std::string detail) const {
    if (failures_ == 0) return {Verdict::pass, std::move(detail)};
    return {Verdict::fail, fmt::format("{} violations: {}", failures_, notes_)};
  }

 private:
  int failures_ = 0;
  std::string notes_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

harness::ExperimentConfig bundled_config() {
  harness::ExperimentConfig config;
  config.scene.obj_path = std::string(SCANPLAN_DATA_DIR) + "/blocks.obj";
  return config;
}

const harness::PlanningContext& bundled() {
  static const auto ctx = harness::prepare(bundled_config());
  return *ctx;
}

bool walk_ok(const orienteering::PlanGraph& g, const orienteering::Walk& w, double budget) {
  if (w.nodes.empty() || w.nodes.front() != g.root || w.nodes.back() != g.root) return false;
  if (static_cast<int>(w.nodes.size()) != w.hops + 1) return false;
  for (std::size_t i = 0; i + 1 < w.nodes.size(); ++i) {
    if (!g.adjacent(w.nodes[i], w.nodes[i + 1])) return false;
  }
  return w.hops * g.spacing <= budget;
}

orienteering::PlanGraph random_grid(std::mt19937_64& rng, int max_nodes, double spacing) {
  while (true) {
    const int nx = 2 + static_cast<int>(rng() % 3);
    const int ny = 2 + static_cast<int>(rng() % 3);
    const int root = static_cast<int>(rng() % (nx * ny));
    std::set<int> blocked;
    for (int c = 0; c < nx * ny; ++c) {
      if (c != root && rng() % 5 == 0) blocked.insert(c);
    }
    auto g = testsupport::grid_graph(nx, ny, spacing, root, blocked);
    if (g.size() < 2 || g.size() > max_nodes) continue;
    testsupport::random_rewards(g, rng);
    return g;
  }
}

Outcome submodularity() {
  const auto start = std::chrono::steady_clock::now();
  const auto& ctx = bundled();
  const auto& model = *ctx.model;
  const int n = static_cast<int>(ctx.footprints.size());
  std::mt19937_64 rng(20240601);
  Checker check;
  for (int trial = 0; trial < kSubmodularTriples; ++trial) {
    auto a = model.empty_state();
    auto b = model.empty_state();
    std::vector<char> in_b(n, 0);
    const int size_b = static_cast<int>(rng() % 40);
    for (int k = 0; k < size_b; ++k) {
      const int p = static_cast<int>(rng() % n);
      if (in_b[p]) continue;
      in_b[p] = 1;
      model.apply(b, ctx.footprints[p]);
      if (rng() % 2 == 0) model.apply(a, ctx.footprints[p]);
    }
    int c = 0;
    do c = static_cast<int>(rng() % n); while (in_b[c]);
    const auto gain_a = model.gain_units(a, ctx.footprints[c]);
    const auto gain_b = model.gain_units(b, ctx.footprints[c]);
    check.require(gain_a >= gain_b, fmt::format("diminishing returns at trial {}", trial));
    check.require(gain_b >= 0, fmt::format("negative gain at trial {}", trial));
    check.require(b.units() >= a.units(), fmt::format("monotonicity at trial {}", trial));
  }
  const double elapsed = seconds_since(start);
  check.require(elapsed < kSubmodularSeconds, fmt::format("took {:.1f} s", elapsed));
  return check.outcome(fmt::format("{} triples, {:.1f} s (limit {:.0f} s)", kSubmodularTriples, elapsed,
                                   kSubmodularSeconds));
}

Outcome half_approximation() {
  Checker check;
  double worst = 1.0;
  for (int i = 0; i < kApproxInstances; ++i) {
    const int nodes = 2 + i % 4;
    const int orientations = 2 + (i / 4) % 3;
    const auto t = testsupport::make_tiny(1000 + i, nodes, orientations, 3 + i % 5, 64);
    const auto r = greedy::greedy_orientations(t.ground_set, *t.model, t.fps);
    const double optimum = testsupport::brute_force_optimum(t);
    check.require(r.total_reward >= kApproxRatio * optimum - 1e-12,
                  fmt::format("instance {}: {} < {} * {}", i, r.total_reward, kApproxRatio, optimum));
    if (optimum > 0.0) worst = std::min(worst, r.total_reward / optimum);
  }
  return check.outcome(fmt::format("{} instances, worst greedy/optimum {:.4f} (bar {})", kApproxInstances,
                                   worst, kApproxRatio));
}

Outcome lazy_equals_naive() {
  Checker check;
  for (int i = 0; i < kLazyInstances; ++i) {
    const auto t = testsupport::make_tiny(2000 + i, 5, 4, 6, 64);
    const auto lazy = greedy::greedy_orientations(t.ground_set, *t.model, t.fps);
    const auto naive = greedy::naive_greedy(t.ground_set, *t.model, t.fps);
    check.require(lazy.permutation == naive.permutation, fmt::format("instance {} selections", i));
    check.require(lazy.gain_units == naive.gain_units, fmt::format("instance {} gains", i));
  }
  const auto& ctx = bundled();
  const auto naive = greedy::naive_greedy(ctx.ground_set, *ctx.model, ctx.footprints);
  check.require(naive.permutation == ctx.greedy.permutation, "bundled selections differ");
  check.require(naive.gain_units == ctx.greedy.gain_units, "bundled gains differ");
  check.require(ctx.greedy.evaluations < naive.evaluations,
                fmt::format("lazy {} >= naive {} evaluations", ctx.greedy.evaluations, naive.evaluations));
  return check.outcome(fmt::format("{} tiny instances identical; bundled evaluations lazy {} vs naive {}",
                                   kLazyInstances, ctx.greedy.evaluations, naive.evaluations));
}

Outcome surrogate_guarantees() {
  Checker check;
  const auto& ctx = bundled();
  const auto& g = ctx.graph;
  std::vector<int> prefix;
  std::vector<const coverage::Footprint*> fps;
  for (int pose : ctx.greedy.permutation) {
    prefix.push_back(ctx.ground_set.node_of[pose]);
    fps.push_back(&ctx.footprints[pose]);
    const double gap = std::abs(orienteering::surrogate(g, prefix) - ctx.model->evaluate(fps));
    check.require(gap <= kPrefixTolerance, fmt::format("prefix {} off by {}", prefix.size(), gap));
  }
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < kSurrogateSubsets; ++trial) {
    std::vector<int> subset;
    std::vector<const coverage::Footprint*> sub_fps;
    const auto p = 1 + rng() % 60;
    for (int v = 0; v < g.size(); ++v) {
      if (rng() % 100 >= p) continue;
      subset.push_back(v);
      sub_fps.push_back(&ctx.node_footprints[v]);
    }
    const double s = orienteering::surrogate(g, subset);
    const double f = ctx.model->evaluate(sub_fps);
    check.require(s <= f + kDominanceTolerance, fmt::format("subset {}: {} > {}", trial, s, f));
  }
  int trajectories = 0;
  for (double budget : ctx.config.budgets) {
    for (const auto& method : {"ours", "nbv", "ratio"}) {
      const auto run = harness::run_method(ctx, method, budget, {});
      ++trajectories;
      check.require(run.trajectory.true_reward >= run.trajectory.surrogate_reward - kDominanceTolerance,
                    fmt::format("{} at {}: true {} < surrogate {}", method, budget,
                                run.trajectory.true_reward, run.trajectory.surrogate_reward));
    }
  }
  return check.outcome(fmt::format("{} prefixes, {} subsets, {} solver trajectories",
                                   ctx.greedy.permutation.size(), kSurrogateSubsets, trajectories));
}

Outcome orienteering_correctness() {
  Checker check;
  std::mt19937_64 rng(4242);
  double worst = 1.0;
  for (int i = 0; i < kHeuristicInstances; ++i) {
    const auto g = random_grid(rng, kHeuristicMaxNodes, 1.0);
    const double budget = static_cast<double>(2 + rng() % 12);
    const auto h = orienteering::heuristic_backend(g, budget);
    const auto e = orienteering::exact_backend(g, budget);
    check.require(walk_ok(g, h, budget), fmt::format("heuristic walk {} invalid", i));
    check.require(walk_ok(g, e, budget), fmt::format("exact walk {} invalid", i));
    const auto hu = static_cast<double>(orienteering::surrogate_units(g, h.nodes));
    const auto eu = static_cast<double>(orienteering::surrogate_units(g, e.nodes));
    check.require(hu >= kHeuristicRatio * eu, fmt::format("instance {}: {} < {} * {}", i, hu, kHeuristicRatio, eu));
    if (eu > 0.0) worst = std::min(worst, hu / eu);
  }
  for (int i = 0; i < kEnumerationInstances; ++i) {
    const double spacing = 1.0 + static_cast<double>(rng() % 3);
    const auto g = random_grid(rng, kEnumerationMaxNodes, spacing);
    const double budget = spacing * static_cast<double>(rng() % 11);
    const auto e = orienteering::exact_backend(g, budget);
    check.require(walk_ok(g, e, budget), fmt::format("exact walk {} invalid", i));
    const int hops = orienteering::budget_hops(budget, g.spacing);
    check.require(orienteering::surrogate_units(g, e.nodes) == testsupport::enumerate_walks(g, hops),
                  fmt::format("enumeration instance {} differs", i));
  }
  return check.outcome(fmt::format("worst heuristic/exact {:.4f} (bar {}) over {}; exact = enumeration on {}",
                                   worst, kHeuristicRatio, kHeuristicInstances, kEnumerationInstances));
}

bool solver_available() { return std::system("python3 -c 'import highspy' >/dev/null 2>&1") == 0; }

Outcome ilp_fidelity() {
  Checker check;
  std::mt19937_64 rng(515);
  for (int i = 0; i < kRoundTripInstances; ++i) {
    const auto g = random_grid(rng, 12, 10.0);
    const double budget = 10.0 * static_cast<double>(rng() % 14);
    const auto m = ilp::export_ilp(g, budget);
    for (const auto& w : {orienteering::exact_backend(g, budget), orienteering::heuristic_backend(g, budget)}) {
      const auto a = ilp::encode(m, w);
      const auto cycle = ilp::decode(m, a);
      const auto walk = ilp::to_graph_walk(g, m, cycle);
      check.require(ilp::encode(m, cycle) == a, fmt::format("instance {} assignment changed", i));
      check.require(std::set<int>(walk.nodes.begin(), walk.nodes.end()) ==
                        std::set<int>(w.nodes.begin(), w.nodes.end()),
                    fmt::format("instance {} node set changed", i));
      check.require(walk_ok(g, walk, budget), fmt::format("instance {} decoded walk invalid", i));
      check.require(std::abs(ilp::objective_value(m, a) - orienteering::surrogate(g, w.nodes)) <= 1e-9,
                    fmt::format("instance {} objective differs", i));
    }
  }
  if (!solver_available()) {
    auto out = check.outcome("");
    if (out.verdict == Verdict::fail) return out;
    return {Verdict::skip, fmt::format("{} round trips exact; highspy not installed, solver comparison skipped",
                                       kRoundTripInstances)};
  }
  const auto dir = fs::temp_directory_path() / "scanplan_acceptance_ilp";
  fs::create_directories(dir);
  for (int i = 0; i < kSolverInstances; ++i) {
    const auto g = random_grid(rng, 10, 10.0);
    const double budget = 10.0 * static_cast<double>(2 + rng() % 10);
    const auto m = ilp::export_ilp(g, budget);
    std::ofstream(dir / "model.lp") << m.to_lp();
    const std::string cmd = "python3 " SCANPLAN_TOOLS_DIR "/solve_lp_highs.py " + (dir / "model.lp").string() +
                            " " + (dir / "solution.txt").string() + " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      check.require(false, fmt::format("solver failed on instance {}", i));
      continue;
    }
    std::ifstream in(dir / "solution.txt");
    const auto walk = ilp::to_graph_walk(g, m, ilp::decode(m, ilp::read_assignment(in)));
    check.require(walk_ok(g, walk, budget), fmt::format("solver walk {} invalid", i));
    check.require(orienteering::surrogate_units(g, walk.nodes) ==
                      orienteering::surrogate_units(g, orienteering::exact_backend(g, budget).nodes),
                  fmt::format("solver optimum {} differs from exact", i));
  }
  fs::remove_all(dir);
  return check.outcome(fmt::format("{} round trips exact; HiGHS optimum equals exact on {}", kRoundTripInstances,
                                   kSolverInstances));
}

struct SweepResult {
  std::vector<harness::MethodRun> runs;
  double seconds = 0.0;
};

const SweepResult& sweep() {
  static const SweepResult result = [] {
    SweepResult r;
    const auto start = std::chrono::steady_clock::now();
    const auto ctx = harness::prepare(bundled_config());
    for (double budget : ctx->config.budgets) {
      auto runs = harness::run_all(*ctx, budget);
      r.runs.insert(r.runs.end(), runs.begin(), runs.end());
    }
    r.seconds = seconds_since(start);
    return r;
  }();
  return result;
}

double true_reward(const SweepResult& s, const std::string& method, double budget) {
  for (const auto& r : s.runs) {
    if (r.trajectory.method == method && r.budget == budget) return r.trajectory.true_reward;
  }
  throw std::runtime_error("missing sweep run " + method);
}

Outcome sweep_ordering() {
  Checker check;
  const auto& s = sweep();
  auto budgets = bundled().config.budgets;
  std::sort(budgets.begin(), budgets.end());
  std::string detail;
  for (std::size_t k = budgets.size() - 2; k < budgets.size(); ++k) {
    const double b = budgets[k];
    const double ours = true_reward(s, "ours", b);
    const double nbv = true_reward(s, "nbv", b);
    const double random = true_reward(s, "random", b);
    check.require(ours >= nbv, fmt::format("budget {}: ours {:.3f} < nbv {:.3f}", b, ours, nbv));
    check.require(nbv >= random, fmt::format("budget {}: nbv {:.3f} < random {:.3f}", b, nbv, random));
    detail += fmt::format("budget {}: ours {:.1f}, nbv {:.1f}, random {:.1f}, ours/nbv {:+.1f}%; ", b, ours, nbv,
                          random, 100.0 * (ours / nbv - 1.0));
  }
  check.require(s.seconds < kSweepSeconds, fmt::format("sweep took {:.1f} s", s.seconds));
  return check.outcome(detail + fmt::format("sweep {:.1f} s", s.seconds));
}

Outcome waypoint_count() {
  const auto& ctx = bundled();
  const auto run = harness::run_method(ctx, "ours", ctx.config.budget, {});
  const double count = static_cast<double>(run.trajectory.captures.size());
  Checker check;
  check.require(ctx.config.budget == 960.0 && ctx.config.image_spacing == 3.5, "unexpected default budget/spacing");
  check.require(std::abs(count - kWaypointTarget) <= kWaypointTolerance * kWaypointTarget,
                fmt::format("{} waypoints", count));
  return check.outcome(fmt::format("{} waypoints at budget {} spacing {} (target {} +/- {:.0f}%)", count,
                                   ctx.config.budget, ctx.config.image_spacing, kWaypointTarget,
                                   100.0 * kWaypointTolerance));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  Checker check;
  const auto root = fs::temp_directory_path() / "scanplan_acceptance_repro";
  fs::remove_all(root);
  const auto config = root / "config.json";
  fs::create_directories(root);
  std::ofstream(config) << harness::to_json(bundled_config()).dump(2);
  for (const auto* run : {"a", "b"}) {
    const std::string cmd = std::string(SCANPLAN_CLI) + " compare -c " + config.string() + " -o " +
                            (root / run).string() + " >/dev/null 2>&1";
    check.require(std::system(cmd.c_str()) == 0, fmt::format("run {} failed", run));
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename().string();
    // Wall-clock seconds, and the resolved config names its own output directory.
    if (name == "timing.csv" || name == "config.resolved.json") continue;
    ++compared;
    check.require(slurp(entry.path()) == slurp(root / "b" / name), name + " differs");
  }
  check.require(compared >= 10, fmt::format("only {} files emitted", compared));
  fs::remove_all(root);
  return check.outcome(fmt::format("{} files byte-identical across two runs", compared));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"submodularity and monotonicity", submodularity},
      {"greedy half-approximation", half_approximation},
      {"lazy equals naive greedy", lazy_equals_naive},
      {"surrogate guarantees", surrogate_guarantees},
      {"orienteering correctness", orienteering_correctness},
      {"ILP fidelity", ilp_fidelity},
      {"budget sweep ordering", sweep_ordering},
      {"waypoint count", waypoint_count},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = out.verdict == Verdict::pass ? "PASS" : out.verdict == Verdict::skip ? "SKIP" : "FAIL";
    if (out.verdict == Verdict::fail) ++failed;
    std::cout << fmt::format("criterion {} {}: {} ({})", i + 1, tag, criteria[i].first, out.detail) << std::endl;
  }
  std::cout << (failed == 0 ? "acceptance: all criteria met" : fmt::format("acceptance: {} failed", failed))
            << std::endl;
  return failed == 0 ? 0 : 1;
}
