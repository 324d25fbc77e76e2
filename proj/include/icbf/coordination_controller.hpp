#pragma once

#include <vector>

#include "icbf/barrier_functions.hpp"
#include "icbf/path_geometry.hpp"
#include "icbf/qp_solver.hpp"
#include "icbf/smooth_max.hpp"
#include "icbf/vehicle_dynamics.hpp"

namespace icbf {

/// Scalar velocity-tracking weights of the state-dependent Riccati controller.
struct DsdreWeights {
  double q = 1.0;
  double r = 4.0;
  double Ts_s = 0.02;
  double v_thld_mps = 0.1;

  void validate() const;
};

/// a11 = F_r(v) / (m v) for v >= v_thld, else 0.
double sdre_factor(const AgentState& x, const AgentParams& p, double v_thld_mps = 0.1);

struct DiscreteScalarModel {
  double a_d = 1.0;
  double b_d = 0.0;
};

/// Exact zero-order hold of dv/dt = -a11 v + u.
DiscreteScalarModel discretize(double a11, double Ts_s);

/// Gain of the scalar discrete Riccati equation, closed form.
/// Throws Uncontrollable when b_d == 0.
double dsdre_gain(const DiscreteScalarModel& model, const DsdreWeights& w);

/// Positive root P of b^2 P^2 + (r - r a^2 - q b^2) P - q r = 0.
double dare_solution(const DiscreteScalarModel& model, const DsdreWeights& w);

/// -K (v - v_ref); intentionally not clamped to the input box.
double nominal_control(const AgentState& x, const AgentParams& p, const DsdreWeights& w);

struct ControllerConfig {
  std::vector<AgentParams> agents;
  std::vector<LinearPath> paths;
  std::vector<DsdreWeights> weights;  // one per agent
  CbfGains gains;
  SmoothMaxSet smooth;
  ConflictGraph graph;
  double buffer_a_m = 1.5;
  double buffer_b_m = 1.5;

  int agent_count() const { return static_cast<int>(agents.size()); }
  void validate() const;
  /// Collision barriers imposed: (i, j) for every j in the conflict set of i.
  std::vector<CollisionPair> collision_pairs() const;
};

struct ControlDecision {
  std::vector<double> u_nom;
  std::vector<double> u_star;
  std::vector<ConstraintRow> rows;
  QpSolution qp;
  double timing_s = 0.0;
};

/// Assembles and solves the centralized min-norm barrier QP each sample.
/// Holds the QP warm start, so one instance per simulated run.
class CoordinationController {
 public:
  explicit CoordinationController(ControllerConfig cfg, QpConfig qp_cfg = {});

  /// Velocity rows for every agent (lower, upper), then the collision rows.
  std::vector<ConstraintRow> assemble_rows(const StackedState& x) const;
  std::vector<double> nominal(const StackedState& x) const;

  /// The QP status is reported in the decision, not thrown; callers decide.
  ControlDecision step(const StackedState& x);

  const ControllerConfig& config() const { return cfg_; }
  const std::vector<CollisionPair>& pairs() const { return pairs_; }

 private:
  ControllerConfig cfg_;
  std::vector<CollisionPair> pairs_;
  QpSolver solver_;
};

/// One-shot control step with a fresh (cold) solver. Throws QpInfeasible
/// unless the QP is solved to optimality.
ControlDecision control_step(const StackedState& x, const ControllerConfig& cfg);

}  // namespace icbf
