#include "icbf/vehicle_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

StateDerivative add_scaled(const StateDerivative& a, const StateDerivative& b, double k) {
  return {a.dv_dt + k * b.dv_dt, a.ds_dt + k * b.ds_dt};
}

AgentState advance(const AgentState& x, const StateDerivative& d, double h) {
  return {x.v_mps + h * d.dv_dt, x.s_m + h * d.ds_dt};
}

}  // namespace

double resistance_force(double v, const AgentParams& p) {
  return sign_or_zero(v) * p.c0_N + p.c1_Ns_per_m * v + p.c2_Ns2_per_m2 * v * v;
}

StateDerivative state_derivative(const AgentState& x, double u, const AgentParams& p) {
  return {-resistance_force(x.v_mps, p) / p.mass_kg + u, x.v_mps};
}

double max_lower_barrier_accel(const AgentParams& p, double lambda_lo) {
  // On (0, v_max] the function is the quadratic (c0 + (c1 - m lambda) v + c2 v^2) / m.
  const double m = p.mass_kg;
  auto g = [&](double v) {
    return (p.c0_N + (p.c1_Ns_per_m - m * lambda_lo) * v + p.c2_Ns2_per_m2 * v * v) / m;
  };
  double best = std::max(0.0, g(0.0));
  best = std::max(best, g(p.v_max_mps));
  if (p.c2_Ns2_per_m2 != 0.0) {
    const double vertex = -(p.c1_Ns_per_m - m * lambda_lo) / (2.0 * p.c2_Ns2_per_m2);
    if (vertex > 0.0 && vertex < p.v_max_mps) best = std::max(best, g(vertex));
  }
  return best;
}

void validate(const AgentParams& p, double lambda_lo) {
  auto fail = [](const std::string& what) { throw InvalidInput("agent params: " + what); };
  if (!(p.mass_kg > 0.0)) fail("mass_kg must be > 0");
  if (!(p.length_m > 0.0) || !(p.width_m > 0.0)) fail("length_m and width_m must be > 0");
  if (!(p.u_min_mps2 < 0.0)) fail("u_min_mps2 must be < 0");
  if (!(p.u_max_mps2 > 0.0)) fail("u_max_mps2 must be > 0");
  if (p.v_min_mps != 0.0) fail("v_min_mps must be 0");
  if (!(p.v_max_mps > 0.0)) fail("v_max_mps must be > 0");
  if (!(p.v_ref_mps >= p.v_min_mps && p.v_ref_mps <= p.v_max_mps))
    fail("v_ref_mps must lie in [v_min, v_max]");
  for (double c : {p.c0_N, p.c1_Ns_per_m, p.c2_Ns2_per_m2})
    if (!std::isfinite(c)) fail("resistance coefficients must be finite");
  const double need = max_lower_barrier_accel(p, lambda_lo);
  if (p.u_max_mps2 < need)
    fail("u_max_mps2 = " + std::to_string(p.u_max_mps2) +
         " is below max_v(F_r/m - lambda_lo v) = " + std::to_string(need));
}

StackedState integrate_step(const StackedState& x, std::span<const double> u,
                            std::span<const AgentParams> params, double dt, int substeps) {
  if (!(dt > 0.0)) throw InvalidInput("integrate_step: dt must be > 0");
  if (substeps < 1) throw InvalidInput("integrate_step: substeps must be >= 1");
  if (u.size() != x.size() || params.size() != x.size())
    throw InvalidInput("integrate_step: state, control and params sizes differ");

  constexpr double kVelocityDust = 1e-9;
  const double h = dt / substeps;
  StackedState out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    AgentState xi = x[i];
    const AgentParams& p = params[i];
    for (int k = 0; k < substeps; ++k) {
      const StateDerivative k1 = state_derivative(xi, u[i], p);
      const StateDerivative k2 = state_derivative(advance(xi, k1, h / 2), u[i], p);
      const StateDerivative k3 = state_derivative(advance(xi, k2, h / 2), u[i], p);
      const StateDerivative k4 = state_derivative(advance(xi, k3, h), u[i], p);
      const StateDerivative sum = add_scaled(add_scaled(add_scaled(k1, k2, 2.0), k3, 2.0), k4, 1.0);
      xi = advance(xi, sum, h / 6.0);
    }
    if (!std::isfinite(xi.v_mps) || !std::isfinite(xi.s_m))
      throw IntegrationDiverged("integrate_step: non-finite state for agent " + std::to_string(i + 1));
    if (xi.v_mps < 0.0 && xi.v_mps > -kVelocityDust) xi.v_mps = 0.0;
    out[i] = xi;
  }
  return out;
}

}  // namespace icbf
