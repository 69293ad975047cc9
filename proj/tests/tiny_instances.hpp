#pragma once

#include <memory>
#include <random>

#include "scanplan/coverage.hpp"
#include "scanplan/greedy.hpp"
#include "test_support.hpp"

namespace testsupport {

// Random small coverage instance in empty space: a few surface samples near
// the origin and camera nodes above them.
struct TinyInstance {
  std::unique_ptr<scanplan::scene::Scene> scene;
  std::unique_ptr<scanplan::coverage::CoverageModel> model;
  scanplan::greedy::GroundSet ground_set;
  std::vector<scanplan::coverage::Footprint> fps;
};

inline TinyInstance make_tiny(std::uint64_t seed, int nodes, int orientations, int samples,
                              int bins) {
  using namespace scanplan;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TinyInstance t;
  t.scene = std::make_unique<scene::Scene>(unit_cube(Vec3(1000, 1000, 1000)));
  std::vector<scene::SurfaceSample> ss;
  for (int j = 0; j < samples; ++j) {
    const Vec3 n = Vec3(0.6 * u(rng), 0.6 * u(rng), 1.0).normalized();
    ss.push_back({Vec3(3 * u(rng), 3 * u(rng), 0.5 * u(rng)), n, 1.0, 0});
  }
  coverage::CoverageParams params;
  params.alpha0_deg = 40.0;
  params.d0 = 6.0;
  params.d_cutoff = 30.0;
  params.bins = bins;
  params.fov_half_angle_deg = 35.0;
  t.model = std::make_unique<coverage::CoverageModel>(*t.scene, std::move(ss), params);
  std::vector<Vec3> positions;
  for (int i = 0; i < nodes; ++i) positions.emplace_back(4 * u(rng), 4 * u(rng), 3.0 + 2.0 * std::abs(u(rng)));
  std::vector<Vec3> looks;
  for (int k = 0; k < orientations; ++k) looks.push_back(Vec3(0.8 * u(rng), 0.8 * u(rng), -1.0).normalized());
  t.ground_set = greedy::GroundSet::cartesian(positions, looks, params.fov_half_angle_deg);
  t.fps = t.model->footprints(t.ground_set.poses);
  return t;
}

// Best reward over every one-pose-per-node assignment.
inline double brute_force_optimum(const TinyInstance& t) {
  const int n = t.ground_set.node_count;
  const int k = static_cast<int>(t.ground_set.orientations.size());
  std::vector<int> choice(n, 0);
  double best = 0.0;
  while (true) {
    std::vector<const scanplan::coverage::Footprint*> ptrs;
    for (int i = 0; i < n; ++i) ptrs.push_back(&t.fps[i * k + choice[i]]);
    best = std::max(best, t.model->evaluate(ptrs));
    int i = 0;
    while (i < n && ++choice[i] == k) choice[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace testsupport
