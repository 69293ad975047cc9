#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "scanplan/scene.hpp"

namespace scanplan::harness {

struct GeneratedScene {
  scene::TriangleMesh mesh;
  nlohmann::json manifest;  // spec, seed, triangles, vertices, area, bbox
};

// Deterministic procedural scenes:
//   blocks  - 100 x 100 m ground quad with non-overlapping open-bottom boxes
//   barn    - closed gabled prism (16 triangles)
//   terrain - heightfield on a resolution x resolution vertex grid
// Throws UnknownSpec for anything else.
GeneratedScene generate_scene(const std::string& spec, std::uint64_t seed,
                              int terrain_resolution = 50);

// Writes <dir>/<stem>.obj and <dir>/<stem>.json.
void write_scene(const GeneratedScene& scene, const std::filesystem::path& dir,
                 const std::string& stem);

}  // namespace scanplan::harness
