#pragma once

// The four-vehicle crossing used throughout the tests, built in code so the
// unit tests do not depend on the TOML loader.

#include <vector>

#include "icbf/path_geometry.hpp"
#include "icbf/vehicle_dynamics.hpp"

namespace fixture {

inline icbf::AgentParams crossing_agent(double mass_kg) {
  icbf::AgentParams p;
  p.mass_kg = mass_kg;
  p.c0_N = 0.01 * mass_kg * 9.81;
  p.c1_Ns_per_m = -0.433;
  p.c2_Ns2_per_m2 = 0.422;
  p.length_m = 5.0;
  p.width_m = 2.0;
  p.u_min_mps2 = -3.0;
  p.u_max_mps2 = 3.0;
  p.v_min_mps = 0.0;
  p.v_max_mps = 15.0;
  p.v_ref_mps = 15.0;
  return p;
}

inline std::vector<icbf::AgentParams> crossing_agents() {
  return {crossing_agent(1200.0), crossing_agent(1300.0), crossing_agent(1400.0), crossing_agent(1500.0)};
}

inline std::vector<icbf::LinearPath> crossing_paths() {
  using icbf::LinearPath;
  using icbf::Vec2;
  return {LinearPath::from_start(Vec2(-80, -2), Vec2(1, 0), 160.0),
          LinearPath::from_start(Vec2(-2, 70), Vec2(0, -1), 140.0),
          LinearPath::from_start(Vec2(75, 2), Vec2(-1, 0), 150.0),
          LinearPath::from_start(Vec2(2, -65), Vec2(0, 1), 130.0)};
}

inline icbf::PairGeometry crossing_pair(int i, int j, double buffer = 1.5) {
  const auto agents = crossing_agents();
  const auto paths = crossing_paths();
  icbf::PairGeometry g;
  g.i = i;
  g.j = j;
  g.path_i = paths[i];
  g.path_j = paths[j];
  g.ellipse = icbf::ellipse_axes(agents[i], paths[i].heading_rad(), agents[j], paths[j].heading_rad(), buffer, buffer);
  return g;
}

}  // namespace fixture

#include "icbf/barrier_functions.hpp"

namespace fixture {

inline icbf::CollisionPair crossing_collision_pair(int i, int j) {
  const auto agents = crossing_agents();
  return {crossing_pair(i, j), agents[i], agents[j]};
}

inline icbf::StackedState crossing_initial_state() { return {{15, 0}, {15, 0}, {15, 0}, {15, 0}}; }

}  // namespace fixture

#include "icbf/coordination_controller.hpp"

namespace fixture {

inline icbf::ControllerConfig crossing_controller() {
  icbf::ControllerConfig cfg;
  cfg.agents = crossing_agents();
  cfg.paths = crossing_paths();
  cfg.weights.assign(4, icbf::DsdreWeights{});
  cfg.graph = icbf::build_conflict_graph(cfg.paths, cfg.agents, 1.5, 1.5, 0.25);
  return cfg;
}

}  // namespace fixture
