#include "scanplan/report.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "scanplan/errors.hpp"

namespace scanplan::harness {

namespace {

using nlohmann::json;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json pose_json(const coverage::CameraPose& p) {
  return {{"position", vec(p.position)}, {"look_at", vec(p.look_at)}, {"fov_half_angle_deg", p.fov_half_angle_deg}};
}

Vec3 to_vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

coverage::CameraPose pose_from(const json& j) {
  return {to_vec(j.at("position")), to_vec(j.at("look_at")), j.at("fov_half_angle_deg").get<double>()};
}

}  // namespace

double running_max(const std::vector<MethodRun>& runs, const MethodRun& run) {
  double best = run.trajectory.true_reward;
  for (const auto& r : runs) {
    if (r.trajectory.method == run.trajectory.method && r.budget <= run.budget) {
      best = std::max(best, r.trajectory.true_reward);
    }
  }
  return best;
}

std::vector<std::string> dip_flags(const std::vector<MethodRun>& runs) {
  std::vector<std::string> out;
  for (const auto& r : runs) {
    const double best = running_max(runs, r);
    if (r.trajectory.true_reward < best) {
      out.push_back(fmt::format("DIP: budget {:g} {} reward {:.6f} below running max {:.6f}", r.budget,
                                r.trajectory.method, r.trajectory.true_reward, best));
    }
  }
  return out;
}

std::string report_csv(const std::vector<MethodRun>& runs) {
  std::string out = "method,budget,length,surrogate_reward,true_reward,pose_count,closed\n";
  for (const auto& r : runs) {
    const auto& t = r.trajectory;
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", t.method, r.budget, t.length,
                       t.surrogate_reward, t.true_reward, t.captures.size(), t.closed ? 1 : 0);
  }
  return out;
}

std::string timing_csv(const std::vector<MethodRun>& runs) {
  std::string out = "method,budget,seconds\n";
  for (const auto& r : runs) out += fmt::format("{},{:.17g},{:.6f}\n", r.trajectory.method, r.budget, r.seconds);
  return out;
}

std::string sweep_csv(const std::vector<MethodRun>& runs) {
  std::string out = "budget,method,reward,running_max,seconds\n";
  for (const auto& r : runs) {
    out += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.6f}\n", r.budget, r.trajectory.method,
                       r.trajectory.true_reward, running_max(runs, r), r.seconds);
  }
  return out;
}

std::string sweep_report_csv(const std::vector<MethodRun>& runs) {
  std::string out = "budget,method,length,surrogate_reward,true_reward,running_max,pose_count\n";
  for (const auto& r : runs) {
    const auto& t = r.trajectory;
    out += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.budget, t.method, t.length,
                       t.surrogate_reward, t.true_reward, running_max(runs, r), t.captures.size());
  }
  return out;
}

std::string gnuplot_script(const std::string& data_file) {
  return fmt::format(
      "# gnuplot -e \"data='{0}'\" plot.gp\n"
      "if (!exists(\"data\")) data = '{0}'\n"
      "set datafile separator ','\n"
      "set key left top\n"
      "set terminal pngcairo size 1200,480\n"
      "set output 'sweep.png'\n"
      "set multiplot layout 1,2\n"
      "set xlabel 'travel budget'\n"
      "set ylabel 'coverage reward'\n"
      "plot for [m in \"ours overhead random nbv ratio\"] data using 1:(strcol(2) eq m ? $4 : 1/0) "
      "with linespoints title m\n"
      "set ylabel 'seconds'\n"
      "set logscale y\n"
      "plot for [m in \"ours overhead random nbv ratio\"] data using 1:(strcol(2) eq m ? $5 : 1/0) "
      "with linespoints title m\n"
      "unset multiplot\n",
      data_file);
}

json trajectory_json(const MethodRun& run) {
  const auto& t = run.trajectory;
  json poses = json::array();
  double travelled = 0.0;
  for (std::size_t i = 0; i < t.poses.size(); ++i) {
    if (i > 0) travelled += (t.poses[i].position - t.poses[i - 1].position).norm();
    auto p = pose_json(t.poses[i]);
    p["cumulative_length"] = travelled;
    poses.push_back(std::move(p));
  }
  json captures = json::array();
  for (const auto& p : t.captures) captures.push_back(pose_json(p));
  return {
      {"method", t.method},
      {"budget", run.budget},
      {"length", t.length},
      {"closed", t.closed},
      {"surrogate_reward", t.surrogate_reward},
      {"true_reward", t.true_reward},
      {"optimality_gap", t.optimality_gap ? json(*t.optimality_gap) : json(nullptr)},
      {"scored_by", t.nodes.empty() ? "captures" : "nodes"},
      {"nodes", t.nodes},
      {"poses", poses},
      {"captures", captures},
  };
}

std::string waypoints_csv(const Trajectory& t) {
  std::string out = "index,x,y,z,look_x,look_y,look_z\n";
  for (std::size_t i = 0; i < t.captures.size(); ++i) {
    const auto& p = t.captures[i];
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, p.position.x(),
                       p.position.y(), p.position.z(), p.look_at.x(), p.look_at.y(), p.look_at.z());
  }
  return out;
}

ParsedTrajectory parse_trajectory(const json& j) {
  try {
    ParsedTrajectory t;
    t.method = j.at("method").get<std::string>();
    t.scored_by = j.at("scored_by").get<std::string>();
    t.nodes = j.at("nodes").get<std::vector<int>>();
    for (const auto& p : j.at("poses")) t.poses.push_back(pose_from(p));
    for (const auto& p : j.at("captures")) t.captures.push_back(pose_from(p));
    t.length = j.at("length").get<double>();
    t.true_reward = j.at("true_reward").get<double>();
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed trajectory: ") + e.what());
  }
}

std::vector<coverage::CameraPose> scored_poses(const ParsedTrajectory& t) {
  if (t.scored_by == "captures") return t.captures;
  std::vector<coverage::CameraPose> out;
  std::vector<int> seen;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), t.nodes[i]) != seen.end()) continue;
    seen.push_back(t.nodes[i]);
    out.push_back(t.poses[i]);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_trajectories(const std::filesystem::path& dir, const std::vector<MethodRun>& runs,
                        const std::string& suffix) {
  for (const auto& r : runs) {
    const auto stem = r.trajectory.method + suffix;
    write_text(dir / ("trajectory_" + stem + ".json"), trajectory_json(r).dump(2) + "\n");
    write_text(dir / ("waypoints_" + stem + ".csv"), waypoints_csv(r.trajectory));
  }
}

}  // namespace scanplan::harness
