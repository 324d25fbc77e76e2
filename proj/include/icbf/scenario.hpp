#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "icbf/barrier_functions.hpp"
#include "icbf/coordination_controller.hpp"
#include "icbf/path_geometry.hpp"
#include "icbf/smooth_max.hpp"
#include "icbf/vehicle_dynamics.hpp"

namespace icbf {

struct AgentConfig {
  std::string name;
  AgentParams params;
  LinearPath path;
  AgentState initial;
};

/// A fully validated scenario. The conflict graph is derived at load time.
struct ScenarioConfig {
  std::string name;
  std::vector<AgentConfig> agents;
  CbfGains gains;
  DsdreWeights weights;
  SmoothMaxSet smooth;
  double buffer_a_m = 1.5;
  double buffer_b_m = 1.5;
  double conflict_margin_m = 0.25;
  double Ts_s = 0.02;
  double duration_s = 12.0;
  int substeps = 10;
  std::uint64_t seed = 0;  // reserved
  std::string output_dir = "out";
  ConflictGraph graph;

  int agent_count() const { return static_cast<int>(agents.size()); }
  StackedState initial_state() const;
  std::vector<AgentParams> params() const;
  ControllerConfig controller_config() const;
};

/// Parses the TOML schema documented in README.md, validates every field and
/// builds the conflict graph. Throws ConfigError naming the offending field,
/// or listing every barrier that is negative at t = 0.
ScenarioConfig parse_scenario(std::string_view toml_text, std::string_view source = "<memory>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Validates parameters, rebuilds the graph and enforces the start-in-safe-set
/// rule. Called by the loaders; call again after editing a config by hand.
void finalize_scenario(ScenarioConfig& cfg);

struct BarrierValue {
  std::string name;
  double h = 0.0;
};

/// Every barrier imposed by the controller evaluated at `x`, in row order.
/// A pair with coincident centers reports h = -infinity.
std::vector<BarrierValue> barrier_values(const StackedState& x, const ControllerConfig& cfg);

}  // namespace icbf
