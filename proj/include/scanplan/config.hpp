#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scanplan/coverage.hpp"

namespace scanplan::harness {

struct SceneSource {
  std::string generator = "blocks";  // ignored when obj_path is set
  std::uint64_t seed = 1;
  std::string obj_path;
};

struct BaselineSettings {
  double orbit_radius = 35.0;
  double orbit_height = 35.0;
  int orbit_segments = 64;
  double row_spacing = 20.0;
};

struct ExperimentConfig {
  SceneSource scene;
  Aabb bbox{Vec3(-50, -50, 0), Vec3(50, 50, 40)};
  double lattice_spacing = 10.0;
  double voxel_size = 2.0;
  double clearance = 3.0;
  Vec3 root{-50, -50, 10};
  double surface_spacing = 2.0;
  std::uint64_t seed = 7;  // surface sampling and the random baseline
  coverage::CoverageParams coverage;
  std::vector<double> ring_elevations_deg{30.0, 60.0};
  int azimuths = 8;
  double budget = 960.0;
  std::vector<double> budgets{0.0, 240.0, 480.0, 720.0, 960.0, 1200.0};
  double image_spacing = 3.5;
  std::string backend = "heuristic";
  BaselineSettings baseline;
  std::string output_dir = "out";
};

// Every field is written, so the output is a complete resolved config.
nlohmann::json to_json(const ExperimentConfig& config);
// Missing keys keep their defaults; unknown keys and invalid values throw
// ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

}  // namespace scanplan::harness
