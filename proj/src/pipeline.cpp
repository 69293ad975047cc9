#include "scanplan/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "scanplan/errors.hpp"
#include "scanplan/scene_gen.hpp"

namespace scanplan::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const MethodRun* find(const std::vector<MethodRun>& runs, const std::string& method) {
  for (const auto& r : runs) {
    if (r.trajectory.method == method) return &r;
  }
  return nullptr;
}

}  // namespace

scene::TriangleMesh load_scene_mesh(const ExperimentConfig& config) {
  if (!config.scene.obj_path.empty()) return scene::load_mesh(config.scene.obj_path).mesh;
  return generate_scene(config.scene.generator, config.scene.seed).mesh;
}

std::unique_ptr<PlanningContext> prepare(const ExperimentConfig& config) {
  validate(config);
  auto ctx = std::make_unique<PlanningContext>();
  ctx->config = config;
  auto tick = Clock::now();

  ctx->scene = std::make_unique<scene::Scene>(load_scene_mesh(config));
  const auto& mesh = ctx->scene->mesh();
  ctx->scene_bounds = mesh.bounds();
  ctx->scene_center = ctx->scene_bounds.center();
  auto samples = scene::sample_surface(mesh, config.surface_spacing, config.seed);
  ctx->model = std::make_unique<coverage::CoverageModel>(
      *ctx->scene, std::move(samples), coverage::resolve(config.coverage, ctx->scene_bounds));
  ctx->stage_seconds["scene"] = seconds_since(tick);

  tick = Clock::now();
  ctx->free = scene::build_free_space(*ctx->scene, config.bbox, config.voxel_size, config.clearance);
  ctx->lattice = orienteering::build_ground_positions(config.bbox, config.lattice_spacing, ctx->free);
  auto graph = orienteering::build_graph(ctx->lattice, ctx->free, config.root);
  ctx->stage_seconds["graph"] = seconds_since(tick);

  tick = Clock::now();
  const double fov = ctx->model->params().fov_half_angle_deg;
  const auto orientations = greedy::downward_orientations(config.ring_elevations_deg, config.azimuths);
  ctx->ground_set = greedy::GroundSet::cartesian(graph.positions, orientations, fov);
  ctx->footprints = ctx->model->footprints(ctx->ground_set.poses);
  ctx->stage_seconds["footprints"] = seconds_since(tick);

  tick = Clock::now();
  ctx->greedy = greedy::greedy_orientations(ctx->ground_set, *ctx->model, ctx->footprints);
  ctx->graph = orienteering::attach_rewards(std::move(graph), ctx->greedy, ctx->ground_set);
  ctx->node_poses = baselines::greedy_node_poses(ctx->greedy, ctx->ground_set);
  ctx->node_footprints.reserve(ctx->node_poses.size());
  for (int node = 0; node < ctx->graph.size(); ++node) {
    ctx->node_footprints.push_back(ctx->footprints[ctx->greedy.selected[node]]);
  }
  ctx->stage_seconds["greedy"] = seconds_since(tick);

  tick = Clock::now();
  ctx->metric = std::make_unique<orienteering::HopMetric>(ctx->graph);
  ctx->stage_seconds["metric"] = seconds_since(tick);
  return ctx;
}

double score(const PlanningContext& ctx, const Trajectory& t) {
  if (t.nodes.empty()) return ctx.model->evaluate(t.captures);
  // Reuse cached footprints where a node carries its greedy pose.
  std::vector<coverage::Footprint> computed;
  std::vector<const coverage::Footprint*> fps;
  computed.reserve(t.nodes.size());
  std::vector<int> seen;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const int v = t.nodes[i];
    if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
    seen.push_back(v);
    const auto& pose = t.poses[i];
    const auto& cached = ctx.node_poses[v];
    if (pose.position == cached.position && pose.look_at == cached.look_at &&
        pose.fov_half_angle_deg == cached.fov_half_angle_deg) {
      fps.push_back(&ctx.node_footprints[v]);
    } else {
      computed.push_back(ctx.model->footprint(pose));
      fps.push_back(&computed.back());
    }
  }
  return ctx.model->evaluate(std::span<const coverage::Footprint* const>(fps));
}

baselines::BaselineConfig baseline_config(const PlanningContext& ctx, double budget) {
  const auto& c = ctx.config;
  baselines::BaselineConfig b;
  b.orbit_radius = c.baseline.orbit_radius;
  b.orbit_height = c.baseline.orbit_height;
  b.orbit_segments = c.baseline.orbit_segments;
  b.row_spacing = c.baseline.row_spacing;
  b.scene_center = ctx.scene_center;
  b.footprint = c.bbox;
  b.seed = c.seed;
  b.budget = budget;
  b.image_spacing = c.image_spacing;
  b.fov_half_angle_deg = ctx.model->params().fov_half_angle_deg;
  return b;
}

MethodRun run_method(const PlanningContext& ctx, const std::string& method, double budget,
                     const orienteering::SolveOptions& options) {
  const auto start = Clock::now();
  const double fov = ctx.model->params().fov_half_angle_deg;
  Trajectory t;
  if (method == "ours") {
    const auto backend = orienteering::parse_backend(ctx.config.backend);
    const auto walk = orienteering::solve_orienteering(ctx.graph, budget, backend, options);
    t = orienteering::to_trajectory(ctx.graph, walk, ctx.node_poses, "ours");
  } else if (method == "overhead") {
    t = baselines::overhead_trajectory(baseline_config(ctx, budget), ctx.free);
  } else if (method == "random") {
    t = baselines::random_trajectory(ctx.graph, *ctx.metric, budget, ctx.config.seed,
                                     ctx.scene_center, fov);
  } else if (method == "nbv") {
    t = baselines::next_best_view(ctx.graph, *ctx.metric, *ctx.model, ctx.node_footprints,
                                  ctx.node_poses, budget);
  } else if (method == "ratio") {
    t = baselines::ratio_greedy(ctx.graph, *ctx.metric, *ctx.model, ctx.node_footprints,
                                ctx.node_poses, budget);
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  if (!t.nodes.empty()) t.captures = orienteering::sample_captures(t.poses, ctx.config.image_spacing);
  t.true_reward = score(ctx, t);
  MethodRun run{std::move(t), budget, 0.0};
  run.seconds = seconds_since(start);
  return run;
}

std::vector<MethodRun> run_all(const PlanningContext& ctx, double budget,
                               const orienteering::SolveOptions& options) {
  std::vector<MethodRun> runs;
  for (const auto& m : method_names()) runs.push_back(run_method(ctx, m, budget, options));
  return runs;
}

std::vector<std::string> ordering_flags(const std::vector<MethodRun>& runs) {
  std::vector<std::string> out;
  auto check = [&](const char* hi, const char* lo) {
    const auto* a = find(runs, hi);
    const auto* b = find(runs, lo);
    if (a == nullptr || b == nullptr) return;
    const double ra = a->trajectory.true_reward;
    const double rb = b->trajectory.true_reward;
    out.push_back(fmt::format("{}: budget {:g} {} >= {} ({:.6f} vs {:.6f})", ra >= rb ? "ok" : "FLAG",
                              a->budget, hi, lo, ra, rb));
  };
  check("ours", "nbv");
  check("nbv", "random");
  check("ours", "ratio");
  check("ratio", "random");
  return out;
}

}  // namespace scanplan::harness
