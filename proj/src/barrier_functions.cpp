#include "icbf/barrier_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icbf/errors.hpp"

namespace icbf {

void CbfGains::validate() const {
  if (!(lambda_lo > 0.0 && lambda_hi > 0.0 && lambda_c > 0.0))
    throw InvalidInput("CBF gains must be positive");
  if (lambda_lo < lambda_hi)
    throw InvalidInput("lambda_lo must be >= lambda_hi for the velocity barriers to share a control");
}

VelocityCbfValues velocity_cbf_values(const AgentState& x, const AgentParams& p) {
  return {x.v_mps - p.v_min_mps, p.v_max_mps - x.v_mps};
}

std::pair<ConstraintRow, ConstraintRow> velocity_cbf_rows(int agent, int agent_count, const AgentState& x,
                                                          const AgentParams& p, const CbfGains& gains) {
  const VelocityCbfValues h = velocity_cbf_values(x, p);
  const double drag = resistance_force(x.v_mps, p) / p.mass_kg;

  ConstraintRow lower;
  lower.coeffs.assign(agent_count, 0.0);
  lower.coeffs[agent] = 1.0;
  lower.rhs_floor = drag - gains.lambda_lo * h.h_lo;
  lower.h_value = h.h_lo;
  lower.lambda = gains.lambda_lo;
  lower.kind = CbfKind::velocity_lower;
  lower.agent_i = agent;

  ConstraintRow upper;
  upper.coeffs.assign(agent_count, 0.0);
  upper.coeffs[agent] = -1.0;
  upper.rhs_floor = -drag - gains.lambda_hi * h.h_hi;
  upper.h_value = h.h_hi;
  upper.lambda = gains.lambda_hi;
  upper.kind = CbfKind::velocity_upper;
  upper.agent_i = agent;
  return {lower, upper};
}

SmoothValue effective_decel(const AgentState& x, const AgentParams& p, const CbfGains& gains,
                            const SmoothMaxSet& smx) {
  const SmoothValue m = bounded_max(p.u_min_mps2, -gains.lambda_lo * x.v_mps, smx.decel);
  return {m.value, -gains.lambda_lo * m.slope};
}

double effective_decel_exact(const AgentState& x, const AgentParams& p, const CbfGains& gains) {
  return std::max(p.u_min_mps2, -gains.lambda_lo * x.v_mps);
}

namespace {

// Cosines between the unit line-of-centers n = (P_j - P_i)/|.| and each
// heading, with gradients with respect to (s_i, s_j).
struct LineCosines {
  double ci = 0.0;  // n . e_i
  double cj = 0.0;  // n . e_j
  double dci_dsi = 0.0, dci_dsj = 0.0;
  double dcj_dsi = 0.0, dcj_dsj = 0.0;
};

LineCosines line_cosines(const SeparationJet& jet, const PairGeometry& g) {
  // Work in Agent i's body frame where e_i = (1, 0).
  const Vec2& w = jet.offset_body;
  const double r = jet.range_m;
  const Vec2 ei(1.0, 0.0);
  const Vec2 ej(g.path_i.direction.x() * g.path_j.direction.x() + g.path_i.direction.y() * g.path_j.direction.y(),
                -g.path_i.direction.y() * g.path_j.direction.x() + g.path_i.direction.x() * g.path_j.direction.y());
  auto grad = [&](const Vec2& k) -> Vec2 { return k / r - w.dot(k) * w / (r * r * r); };
  LineCosines c;
  c.ci = w.dot(ei) / r;
  c.cj = w.dot(ej) / r;
  const Vec2 gi = grad(ei);
  const Vec2 gj = grad(ej);
  // dw/ds_i = -e_i, dw/ds_j = e_j (body frame)
  c.dci_dsi = -gi.dot(ei);
  c.dci_dsj = gi.dot(ej);
  c.dcj_dsi = -gj.dot(ei);
  c.dcj_dsj = gj.dot(ej);
  return c;
}

}  // namespace

ProjectedDecel projected_decel(const StackedState& x, const CollisionPair& pair, const CbfGains& gains,
                               const SmoothMaxSet& smx) {
  const PairGeometry& g = pair.geometry;
  const SeparationJet jet = separation_jet(x.at(g.i), x.at(g.j), g);
  const LineCosines c = line_cosines(jet, g);
  const double ai = effective_decel(x.at(g.i), pair.params_i, gains, smx).value;
  const double aj = effective_decel(x.at(g.j), pair.params_j, gains, smx).value;
  // (P_i - P_j)/|.| . R(psi_i)[a, 0] = -c_i a ; (P_j - P_i)/|.| . R(psi_j)[a, 0] = c_j a
  return {-c.ci * ai, c.cj * aj};
}

double safe_distance(double v_ij, double ahat_i, double ahat_j, const SmoothMaxSet& smx) {
  const double q = bounded_max(0.0, -v_ij, smx.closing_speed).value;
  const double den = bounded_max(smx.epsilon_mps2, ahat_i, smx.braking_floor).value +
                     bounded_max(smx.epsilon_mps2, ahat_j, smx.braking_floor).value;
  return q * q / (2.0 * den);
}

double safe_distance_exact(double v_ij, double ahat_i, double ahat_j, double epsilon) {
  const double q = std::max(0.0, -v_ij);
  return q * q / (2.0 * (std::max(epsilon, ahat_i) + std::max(epsilon, ahat_j)));
}

double safe_distance_exact(const StackedState& x, const CollisionPair& pair, const CbfGains& gains,
                           double epsilon) {
  const PairGeometry& g = pair.geometry;
  const SeparationJet jet = separation_jet(x.at(g.i), x.at(g.j), g);
  const LineCosines c = line_cosines(jet, g);
  const double ahat_i = -c.ci * effective_decel_exact(x.at(g.i), pair.params_i, gains);
  const double ahat_j = c.cj * effective_decel_exact(x.at(g.j), pair.params_j, gains);
  return safe_distance_exact(jet.v_ij, ahat_i, ahat_j, epsilon);
}

CollisionCbfEval evaluate_collision_cbf(const StackedState& x, const CollisionPair& pair,
                                        const CbfGains& gains, const SmoothMaxSet& smx) {
  const PairGeometry& g = pair.geometry;
  const AgentState& xi = x.at(g.i);
  const AgentState& xj = x.at(g.j);
  const SeparationJet jet = separation_jet(xi, xj, g);
  const LineCosines c = line_cosines(jet, g);

  const SmoothValue ai = effective_decel(xi, pair.params_i, gains, smx);
  const SmoothValue aj = effective_decel(xj, pair.params_j, gains, smx);

  // projected braking authorities and their partials
  const double ahat_i = -c.ci * ai.value;
  const double ahat_j = c.cj * aj.value;
  const double dai_dvi = -c.ci * ai.slope;
  const double dai_dsi = -c.dci_dsi * ai.value;
  const double dai_dsj = -c.dci_dsj * ai.value;
  const double daj_dvj = c.cj * aj.slope;
  const double daj_dsi = c.dcj_dsi * aj.value;
  const double daj_dsj = c.dcj_dsj * aj.value;

  const SmoothValue bi = bounded_max(smx.epsilon_mps2, ahat_i, smx.braking_floor);
  const SmoothValue bj = bounded_max(smx.epsilon_mps2, ahat_j, smx.braking_floor);
  const double den = bi.value + bj.value;
  const double dden_dvi = bi.slope * dai_dvi;
  const double dden_dvj = bj.slope * daj_dvj;
  const double dden_dsi = bi.slope * dai_dsi + bj.slope * daj_dsi;
  const double dden_dsj = bi.slope * dai_dsj + bj.slope * daj_dsj;

  const SmoothValue q = bounded_max(0.0, -jet.v_ij, smx.closing_speed);
  const double dq_dvi = -q.slope * jet.dvij_dvi;
  const double dq_dvj = -q.slope * jet.dvij_dvj;
  const double dq_dsi = -q.slope * jet.dvij_dsi;
  const double dq_dsj = -q.slope * jet.dvij_dsj;

  const double d_safe = q.value * q.value / (2.0 * den);
  auto d_safe_partial = [&](double dq, double dden) {
    return q.value * dq / den - q.value * q.value * dden / (2.0 * den * den);
  };

  CollisionCbfEval out;
  out.d = jet.d_m;
  out.d_safe = d_safe;
  out.h = jet.d_m - d_safe;
  out.v_ij = jet.v_ij;
  out.ahat_i = ahat_i;
  out.ahat_j = ahat_j;
  out.dh_dvi = -d_safe_partial(dq_dvi, dden_dvi);
  out.dh_dvj = -d_safe_partial(dq_dvj, dden_dvj);
  out.dh_dsi = jet.dd_dsi - d_safe_partial(dq_dsi, dden_dsi);
  out.dh_dsj = jet.dd_dsj - d_safe_partial(dq_dsj, dden_dsj);
  return out;
}

double collision_cbf_value(const StackedState& x, const CollisionPair& pair, const CbfGains& gains,
                           const SmoothMaxSet& smx) {
  return evaluate_collision_cbf(x, pair, gains, smx).h;
}

ConstraintRow collision_cbf_row(const StackedState& x, const CollisionPair& pair, int agent_count,
                                const CbfGains& gains, const SmoothMaxSet& smx) {
  const PairGeometry& g = pair.geometry;
  const CollisionCbfEval e = evaluate_collision_cbf(x, pair, gains, smx);
  const AgentState& xi = x.at(g.i);
  const AgentState& xj = x.at(g.j);
  const StateDerivative fi = state_derivative(xi, 0.0, pair.params_i);
  const StateDerivative fj = state_derivative(xj, 0.0, pair.params_j);
  const double lf_h = e.dh_dvi * fi.dv_dt + e.dh_dsi * fi.ds_dt + e.dh_dvj * fj.dv_dt + e.dh_dsj * fj.ds_dt;

  ConstraintRow row;
  row.coeffs.assign(agent_count, 0.0);
  row.coeffs[g.i] = e.dh_dvi;
  row.coeffs[g.j] = e.dh_dvj;
  row.rhs_floor = -lf_h - gains.lambda_c * e.h;
  row.h_value = e.h;
  row.lambda = gains.lambda_c;
  row.kind = CbfKind::collision;
  row.agent_i = g.i;
  row.agent_j = g.j;
  return row;
}

}  // namespace icbf
