#pragma once

#include <span>
#include <vector>

namespace icbf {

/// Physical constants, input bounds and footprint of one vehicle.
struct AgentParams {
  double mass_kg = 1200.0;
  double c0_N = 0.0;           // Coulomb-like rolling term, multiplied by sign(v)
  double c1_Ns_per_m = 0.0;
  double c2_Ns2_per_m2 = 0.0;
  double length_m = 5.0;
  double width_m = 2.0;
  double u_min_mps2 = -3.0;
  double u_max_mps2 = 3.0;
  double v_min_mps = 0.0;
  double v_max_mps = 15.0;
  double v_ref_mps = 15.0;
};

/// Throws InvalidInput if the parameter set is unphysical or if u_max cannot
/// satisfy the lower velocity barrier, i.e. u_max < max_v (F_r(v)/m - lambda_lo v).
void validate(const AgentParams& p, double lambda_lo);

/// Supremum of F_r(v)/m - lambda_lo * v over v in [0, v_max] (v = 0 taken as the
/// right limit, so the c0 jump is included).
double max_lower_barrier_accel(const AgentParams& p, double lambda_lo);

struct AgentState {
  double v_mps = 0.0;
  double s_m = 0.0;
};

/// One AgentState per agent; the size is fixed for the duration of a run.
using StackedState = std::vector<AgentState>;

struct StateDerivative {
  double dv_dt = 0.0;
  double ds_dt = 0.0;
};

/// sign(v) c0 + c1 v + c2 v^2 with sign(0) = 0.
double resistance_force(double v, const AgentParams& p);

/// f(x) + g(x) u for one agent: (-F_r(v)/m + u, v).
StateDerivative state_derivative(const AgentState& x, double u, const AgentParams& p);

/// Zero-order-hold step of the stacked closed loop. Each agent is advanced
/// independently with `substeps` classic RK4 steps of dt/substeps.
/// Negative velocities smaller than 1e-9 in magnitude are snapped to zero;
/// anything larger is kept so that barrier violations stay visible.
/// Throws IntegrationDiverged on a non-finite result.
StackedState integrate_step(const StackedState& x, std::span<const double> u,
                            std::span<const AgentParams> params, double dt,
                            int substeps = 10);

}  // namespace icbf
