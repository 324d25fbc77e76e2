#pragma once

#include <string>
#include <vector>

#include "icbf/path_geometry.hpp"
#include "icbf/qp_solver.hpp"
#include "icbf/scenario.hpp"
#include "icbf/vehicle_dynamics.hpp"

namespace icbf {

struct StepRecord {
  double t_s = 0.0;
  StackedState x;
  std::vector<Vec2> position;
  std::vector<double> u_nom;
  std::vector<double> u;
  std::vector<double> h;  // aligned with SimTrace::cbf_names
  // QP diagnostics; not part of the CSV, rebuilt by replay_controller
  QpStatus status = QpStatus::optimal;
  int iterations = 0;
  double kkt_residual = 0.0;
  double solve_time_s = 0.0;
  bool qp_known = false;
};

struct SimTrace {
  std::string scenario;
  int agent_count = 0;
  std::vector<std::string> cbf_names;
  std::vector<StepRecord> steps;
  bool aborted = false;
  std::string abort_reason;
};

/// Barrier column names in trace order: h_vlo_i, h_vhi_i for each agent, then
/// h_c_ij for each imposed collision barrier.
std::vector<std::string> cbf_columns(const ControllerConfig& cfg);

/// Runs the closed loop for round(duration / Ts) samples. The returned trace
/// has one record per sample including t = 0 and the final time. A QP that
/// is not solved to optimality, or a diverging integration, ends the run
/// early with `aborted` set; the failing sample is kept in the trace.
SimTrace run(const ScenarioConfig& cfg);

/// Recomputes the QP of every recorded state with a fresh controller and fills
/// the diagnostics fields. Returns the largest |h_csv - h_recomputed|.
double replay_controller(SimTrace& trace, const ScenarioConfig& cfg);

}  // namespace icbf
