#include "scanplan/config.hpp"

#include <fstream>
#include <set>

#include "scanplan/errors.hpp"
#include "scanplan/orienteering.hpp"

namespace scanplan::harness {

namespace {

using nlohmann::json;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 to_vec(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(key + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  return {
      {"scene", {{"generator", c.scene.generator}, {"seed", c.scene.seed}, {"obj_path", c.scene.obj_path}}},
      {"bbox", {{"min", vec(c.bbox.min)}, {"max", vec(c.bbox.max)}}},
      {"lattice_spacing", c.lattice_spacing},
      {"voxel_size", c.voxel_size},
      {"clearance", c.clearance},
      {"root", vec(c.root)},
      {"surface_spacing", c.surface_spacing},
      {"seed", c.seed},
      {"coverage",
       {{"alpha0_deg", c.coverage.alpha0_deg},
        {"d0", c.coverage.d0},
        {"d_cutoff", c.coverage.d_cutoff},
        {"M", c.coverage.bins},
        {"fov_half_angle_deg", c.coverage.fov_half_angle_deg},
        {"visibility_epsilon", c.coverage.visibility_epsilon}}},
      {"orientations", {{"ring_elevations_deg", c.ring_elevations_deg}, {"azimuths", c.azimuths}}},
      {"budget", c.budget},
      {"budgets", c.budgets},
      {"image_spacing", c.image_spacing},
      {"backend", c.backend},
      {"baseline",
       {{"orbit_radius", c.baseline.orbit_radius},
        {"orbit_height", c.baseline.orbit_height},
        {"orbit_segments", c.baseline.orbit_segments},
        {"row_spacing", c.baseline.row_spacing}}},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"scene", "bbox", "lattice_spacing", "voxel_size", "clearance", "root",
                "surface_spacing", "seed", "coverage", "orientations", "budget", "budgets",
                "image_spacing", "backend", "baseline", "output_dir"},
               "");
    if (j.contains("scene")) {
      const auto& s = j.at("scene");
      check_keys(s, {"generator", "seed", "obj_path"}, "scene.");
      read(s, "generator", c.scene.generator);
      read(s, "seed", c.scene.seed);
      read(s, "obj_path", c.scene.obj_path);
    }
    if (j.contains("bbox")) {
      const auto& b = j.at("bbox");
      check_keys(b, {"min", "max"}, "bbox.");
      if (b.contains("min")) c.bbox.min = to_vec(b.at("min"), "bbox.min");
      if (b.contains("max")) c.bbox.max = to_vec(b.at("max"), "bbox.max");
    }
    read(j, "lattice_spacing", c.lattice_spacing);
    read(j, "voxel_size", c.voxel_size);
    read(j, "clearance", c.clearance);
    if (j.contains("root")) c.root = to_vec(j.at("root"), "root");
    read(j, "surface_spacing", c.surface_spacing);
    read(j, "seed", c.seed);
    if (j.contains("coverage")) {
      const auto& cv = j.at("coverage");
      check_keys(cv, {"alpha0_deg", "d0", "d_cutoff", "M", "fov_half_angle_deg", "visibility_epsilon"},
                 "coverage.");
      read(cv, "alpha0_deg", c.coverage.alpha0_deg);
      read(cv, "d0", c.coverage.d0);
      read(cv, "d_cutoff", c.coverage.d_cutoff);
      read(cv, "M", c.coverage.bins);
      read(cv, "fov_half_angle_deg", c.coverage.fov_half_angle_deg);
      read(cv, "visibility_epsilon", c.coverage.visibility_epsilon);
    }
    if (j.contains("orientations")) {
      const auto& o = j.at("orientations");
      check_keys(o, {"ring_elevations_deg", "azimuths"}, "orientations.");
      read(o, "ring_elevations_deg", c.ring_elevations_deg);
      read(o, "azimuths", c.azimuths);
    }
    read(j, "budget", c.budget);
    read(j, "budgets", c.budgets);
    read(j, "image_spacing", c.image_spacing);
    read(j, "backend", c.backend);
    if (j.contains("baseline")) {
      const auto& b = j.at("baseline");
      check_keys(b, {"orbit_radius", "orbit_height", "orbit_segments", "row_spacing"}, "baseline.");
      read(b, "orbit_radius", c.baseline.orbit_radius);
      read(b, "orbit_height", c.baseline.orbit_height);
      read(b, "orbit_segments", c.baseline.orbit_segments);
      read(b, "row_spacing", c.baseline.row_spacing);
    }
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(!c.bbox.empty(), "bbox.min must not exceed bbox.max");
  require(c.lattice_spacing > 0.0, "lattice_spacing must be positive");
  require(c.voxel_size > 0.0, "voxel_size must be positive");
  require(c.clearance >= 0.0, "clearance must be non-negative");
  require(c.surface_spacing > 0.0, "surface_spacing must be positive");
  require(c.coverage.bins > 0, "coverage.M must be positive");
  require(c.coverage.fov_half_angle_deg > 0.0 && c.coverage.fov_half_angle_deg < 90.0,
          "coverage.fov_half_angle_deg must lie in (0, 90)");
  require(c.azimuths > 0 || c.ring_elevations_deg.empty(), "orientations.azimuths must be positive");
  require(c.budget >= 0.0, "budget must be non-negative");
  for (double b : c.budgets) require(b >= 0.0, "budgets must be non-negative");
  require(c.image_spacing > 0.0, "image_spacing must be positive");
  require(c.baseline.orbit_radius > 0.0 && c.baseline.orbit_height > 0.0 &&
              c.baseline.row_spacing > 0.0 && c.baseline.orbit_segments >= 3,
          "baseline lengths must be positive");
  require(!c.scene.obj_path.empty() || !c.scene.generator.empty(), "scene needs a generator or obj_path");
  orienteering::parse_backend(c.backend);
}

}  // namespace scanplan::harness
