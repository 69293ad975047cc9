#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scanplan/pipeline.hpp"

namespace scanplan::harness {

// Deterministic per-method table: no timing columns, numbers at full
// round-trip precision.
std::string report_csv(const std::vector<MethodRun>& runs);
std::string timing_csv(const std::vector<MethodRun>& runs);
// Best true reward of the run's method over budgets up to the run's own.
double running_max(const std::vector<MethodRun>& runs, const MethodRun& run);
// "DIP: ..." for every run whose reward falls below its running max.
std::vector<std::string> dip_flags(const std::vector<MethodRun>& runs);
// Long form (budget, method, reward, running max, seconds) for plotting.
std::string sweep_csv(const std::vector<MethodRun>& runs);
// Sweep table without timings, stable across runs.
std::string sweep_report_csv(const std::vector<MethodRun>& runs);
std::string gnuplot_script(const std::string& data_file);

nlohmann::json trajectory_json(const MethodRun& run);
// One row per capture pose.
std::string waypoints_csv(const Trajectory& trajectory);

struct ParsedTrajectory {
  std::string method;
  std::string scored_by;  // "nodes" or "captures"
  std::vector<int> nodes;
  std::vector<coverage::CameraPose> poses;
  std::vector<coverage::CameraPose> captures;
  double length = 0.0;
  double true_reward = 0.0;
};
ParsedTrajectory parse_trajectory(const nlohmann::json& j);
// Poses the reward is defined over.
std::vector<coverage::CameraPose> scored_poses(const ParsedTrajectory& t);

void write_text(const std::filesystem::path& path, const std::string& text);
// trajectory_<method>.json and waypoints_<method>.csv for every run.
void write_trajectories(const std::filesystem::path& dir, const std::vector<MethodRun>& runs,
                        const std::string& suffix = "");

}  // namespace scanplan::harness
