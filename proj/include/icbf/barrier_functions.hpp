#pragma once

#include <utility>

#include "icbf/constraint_row.hpp"
#include "icbf/path_geometry.hpp"
#include "icbf/smooth_max.hpp"
#include "icbf/vehicle_dynamics.hpp"

namespace icbf {

/// Linear class-K gains of the three barrier families.
struct CbfGains {
  double lambda_lo = 5.0;
  double lambda_hi = 5.0;
  double lambda_c = 2.0;

  /// All positive and lambda_lo >= lambda_hi (joint feasibility of the velocity rows).
  void validate() const;
};

struct VelocityCbfValues {
  double h_lo = 0.0;  // v - v_min
  double h_hi = 0.0;  // v_max - v
};

VelocityCbfValues velocity_cbf_values(const AgentState& x, const AgentParams& p);

/// Rows u_i >= F_r/m - lambda_lo (v - v_min) and -u_i >= -F_r/m - lambda_hi (v_max - v).
std::pair<ConstraintRow, ConstraintRow> velocity_cbf_rows(int agent, int agent_count, const AgentState& x,
                                                          const AgentParams& p, const CbfGains& gains);

/// Smooth braking authority compatible with the lower velocity barrier:
/// over-approximation of max{u_min, -lambda_lo v} (so its magnitude is never
/// overstated). `slope` is d/dv.
SmoothValue effective_decel(const AgentState& x, const AgentParams& p, const CbfGains& gains,
                            const SmoothMaxSet& smx);

/// Exact max{u_min, -lambda_lo v}.
double effective_decel_exact(const AgentState& x, const AgentParams& p, const CbfGains& gains);

/// Everything needed to evaluate one collision barrier h_c,ij.
struct CollisionPair {
  PairGeometry geometry;
  AgentParams params_i;
  AgentParams params_j;
};

/// Braking authorities of both agents projected onto the line of centers
/// (positive when braking reduces the closing speed).
struct ProjectedDecel {
  double ahat_i = 0.0;
  double ahat_j = 0.0;
};

ProjectedDecel projected_decel(const StackedState& x, const CollisionPair& pair, const CbfGains& gains,
                               const SmoothMaxSet& smx);

/// Smooth safety distance: closing-speed max over-approximated, each braking
/// floor under-approximated, so the result never falls below the exact value.
double safe_distance(double v_ij, double ahat_i, double ahat_j, const SmoothMaxSet& smx);

/// Safety distance with exact max operators everywhere.
double safe_distance_exact(double v_ij, double ahat_i, double ahat_j, double epsilon);

/// Exact-max safety distance evaluated at a state (exact effective deceleration too).
double safe_distance_exact(const StackedState& x, const CollisionPair& pair, const CbfGains& gains,
                           double epsilon);

/// Value of h_c,ij and its gradient with respect to (v_i, s_i, v_j, s_j).
struct CollisionCbfEval {
  double h = 0.0;
  double d = 0.0;
  double d_safe = 0.0;
  double v_ij = 0.0;
  double ahat_i = 0.0;
  double ahat_j = 0.0;
  double dh_dvi = 0.0;
  double dh_dsi = 0.0;
  double dh_dvj = 0.0;
  double dh_dsj = 0.0;
};

CollisionCbfEval evaluate_collision_cbf(const StackedState& x, const CollisionPair& pair,
                                        const CbfGains& gains, const SmoothMaxSet& smx);

double collision_cbf_value(const StackedState& x, const CollisionPair& pair, const CbfGains& gains,
                           const SmoothMaxSet& smx);

/// Row of the exact gradient of the implemented (smooth) h_c; nonzero
/// coefficients only at agents i and j.
ConstraintRow collision_cbf_row(const StackedState& x, const CollisionPair& pair, int agent_count,
                                const CbfGains& gains, const SmoothMaxSet& smx);

}  // namespace icbf
