#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "icbf/path_geometry.hpp"
#include "icbf/scenario.hpp"
#include "icbf/simulation.hpp"

namespace icbf {

struct OrientedBox {
  Vec2 center = Vec2::Zero();
  double heading_rad = 0.0;
  double length_m = 0.0;
  double width_m = 0.0;
};

/// Separating-axis test on two rectangles. Touching counts as overlap.
bool obb_overlap(const OrientedBox& a, const OrientedBox& b);

struct OverlapEvent {
  std::size_t step = 0;
  double t_s = 0.0;
  int agent_i = 0;
  int agent_j = 0;
};

struct ObbReport {
  std::size_t steps_checked = 0;
  std::size_t pair_checks = 0;
  std::vector<OverlapEvent> overlaps;

  bool clean() const { return overlaps.empty(); }
};

/// Checks every agent pair (not only conflict-graph pairs) at every sample
/// with the physical L x W footprints, no buffers.
ObbReport obb_collision_oracle(const SimTrace& trace, std::span<const AgentConfig> agents);

struct VerifyTolerances {
  double h_floor = -1e-3;
  double comparison_slack = 1e-3;
  double input_tol = 1e-9;
};

struct CbfSummary {
  std::string name;
  double min_h = 0.0;
  double t_min_h = 0.0;
  // min over k of h(t_{k+1}) - (1 - lambda Ts) h(t_k)
  double min_comparison_margin = 0.0;
  double t_min_margin = 0.0;
};

struct SafetyReport {
  std::string scenario;
  std::size_t steps = 0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<CbfSummary> cbfs;
  ObbReport obb;
  std::size_t h_violations = 0;
  std::size_t comparison_violations = 0;
  std::size_t input_violations = 0;
  std::size_t qp_failures = 0;
  std::size_t qp_unknown = 0;
  double qp_time_mean_s = 0.0;
  double qp_time_max_s = 0.0;
  std::vector<std::string> failures;  // first few violations, human readable

  bool clean() const;
};

/// Post-hoc safety audit. Barrier columns are matched by name against the
/// barriers the scenario imposes; lambda comes from the scenario gains.
SafetyReport verify_invariants(const SimTrace& trace, const ScenarioConfig& cfg, const VerifyTolerances& tol = {});

}  // namespace icbf
