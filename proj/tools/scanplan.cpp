#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "scanplan/errors.hpp"
#include "scanplan/ilp.hpp"
#include "scanplan/pipeline.hpp"
#include "scanplan/report.hpp"
#include "scanplan/scene_gen.hpp"

namespace fs = std::filesystem;
using namespace scanplan;
using namespace scanplan::harness;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
  std::optional<std::string> backend;
  std::optional<std::string> out;
  std::string solution;
  std::string arcs = "closure";
};

orienteering::SolveOptions solve_options(const Overrides& o) {
  return {o.solution, ilp::parse_arc_set(o.arcs) == ilp::ArcSet::closure};
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON experiment config (defaults when omitted)");
  cmd->add_option("--seed", o.seed, "Sampling and random-baseline seed");
  cmd->add_option("--budget", o.budget, "Travel budget in metres");
  cmd->add_option("--backend", o.backend, "exact | heuristic | ilp_export");
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_option("--solution", o.solution, "Solver assignment file for the ilp_export backend");
  cmd->add_option("--arcs", o.arcs, "ILP arc set: closure (shortest-path arcs) | edges");
}

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.budget) c.budget = *o.budget;
  if (o.backend) c.backend = *o.backend;
  if (o.out) c.output_dir = *o.out;
  validate(c);
  return c;
}

void write_config(const ExperimentConfig& c) {
  write_text(fs::path(c.output_dir) / "config.resolved.json", to_json(c).dump(2) + "\n");
}

std::string budget_tag(double budget) { return fmt::format("_b{:g}", budget); }

void print_runs(const std::vector<MethodRun>& runs) {
  for (const auto& r : runs) {
    const auto& t = r.trajectory;
    fmt::print("{:<9} budget {:>7g}  length {:>9.3f}  surrogate {:>10.4f}  reward {:>10.4f}  poses {:>4}  {:.2f}s\n",
               t.method, r.budget, t.length, t.surrogate_reward, t.true_reward, t.captures.size(), r.seconds);
  }
}

void write_flags(const fs::path& path, const std::vector<std::string>& flags) {
  std::string text;
  for (const auto& f : flags) {
    text += f + "\n";
    if (f.starts_with("FLAG")) std::cerr << f << "\n";
  }
  write_text(path, text);
}

int cmd_plan(const Overrides& o) {
  const auto config = resolve_config(o);
  const auto ctx = prepare(config);
  auto run = run_method(*ctx, "ours", config.budget, solve_options(o));
  const auto problem = orienteering::validate(run.trajectory, ctx->graph, config.budget);
  if (!problem.empty()) throw Error("invalid trajectory: " + problem);
  const fs::path out(config.output_dir);
  write_config(config);
  const std::vector<MethodRun> runs{run};
  write_trajectories(out, runs);
  write_text(out / "report.csv", report_csv(runs));
  write_text(out / "timing.csv", timing_csv(runs));
  print_runs(runs);
  return 0;
}

int cmd_compare(const Overrides& o) {
  const auto config = resolve_config(o);
  const auto ctx = prepare(config);
  const auto runs = run_all(*ctx, config.budget, solve_options(o));
  const fs::path out(config.output_dir);
  write_config(config);
  write_trajectories(out, runs);
  write_text(out / "report.csv", report_csv(runs));
  write_text(out / "timing.csv", timing_csv(runs));
  write_flags(out / "flags.txt", ordering_flags(runs));
  print_runs(runs);
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const auto config = resolve_config(o);
  const auto ctx = prepare(config);
  std::vector<MethodRun> all;
  std::vector<std::string> flags;
  for (double budget : config.budgets) {
    auto runs = run_all(*ctx, budget, solve_options(o));
    for (auto& f : ordering_flags(runs)) flags.push_back(std::move(f));
    print_runs(runs);
    write_trajectories(fs::path(config.output_dir), runs, budget_tag(budget));
    all.insert(all.end(), runs.begin(), runs.end());
  }
  const fs::path out(config.output_dir);
  write_config(config);
  write_text(out / "sweep.csv", sweep_csv(all));
  write_text(out / "sweep_report.csv", sweep_report_csv(all));
  write_text(out / "plot.gp", gnuplot_script("sweep.csv"));
  for (auto& f : dip_flags(all)) flags.push_back(std::move(f));
  write_flags(out / "flags.txt", flags);
  return 0;
}

int cmd_export_ilp(const Overrides& o) {
  const auto config = resolve_config(o);
  const auto ctx = prepare(config);
  const auto model = ilp::export_ilp(ctx->graph, config.budget, ilp::parse_arc_set(o.arcs));
  const fs::path out(config.output_dir);
  write_config(config);
  write_text(out / "model.lp", model.to_lp());
  std::string nodes = "node,x,y,z,reward\n";
  for (int v = 0; v < ctx->graph.size(); ++v) {
    const auto& p = ctx->graph.positions[v];
    nodes += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", v, p.x(), p.y(), p.z(), ctx->graph.rewards[v]);
  }
  write_text(out / "nodes.csv", nodes);
  fmt::print("wrote {} ({} rows, {} binaries)\n", (out / "model.lp").string(), model.rows.size(),
             model.binaries.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage-maximizing, budget-limited scan trajectory planner"};
  app.require_subcommand(1);
  Overrides o;
  auto* plan = app.add_subcommand("plan", "Plan one trajectory with the configured backend");
  auto* compare = app.add_subcommand("compare", "Run the planner and every baseline at one budget");
  auto* sweep = app.add_subcommand("sweep", "Run compare over the configured budget list");
  auto* export_ilp = app.add_subcommand("export-ilp", "Write the orienteering ILP as CPLEX LP text");
  for (auto* cmd : {plan, compare, sweep, export_ilp}) add_common(cmd, o);

  auto* gen = app.add_subcommand("gen-scene", "Write a procedural scene as OBJ plus manifest");
  std::string spec = "blocks";
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  std::string stem;
  int resolution = 50;
  gen->add_option("--spec", spec, "blocks | barn | terrain");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("-o,--out", gen_out, "Output directory");
  gen->add_option("--stem", stem, "File stem (defaults to the generator name)");
  gen->add_option("--resolution", resolution, "Terrain grid vertices per side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*plan) return cmd_plan(o);
    if (*compare) return cmd_compare(o);
    if (*sweep) return cmd_sweep(o);
    if (*export_ilp) return cmd_export_ilp(o);
    if (*gen) {
      write_scene(generate_scene(spec, gen_seed, resolution), gen_out, stem.empty() ? spec : stem);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
