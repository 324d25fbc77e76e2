#include "icbf/coordination_controller.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "icbf/errors.hpp"

namespace icbf {

void DsdreWeights::validate() const {
  if (!(q >= 0.0)) throw InvalidInput("DSDRE weight q must be >= 0");
  if (!(r > 0.0)) throw InvalidInput("DSDRE weight r must be > 0");
  if (!(Ts_s > 0.0)) throw InvalidInput("sample time must be > 0");
  if (!(v_thld_mps > 0.0)) throw InvalidInput("velocity threshold must be > 0");
}

double sdre_factor(const AgentState& x, const AgentParams& p, double v_thld_mps) {
  if (x.v_mps < v_thld_mps) return 0.0;
  return resistance_force(x.v_mps, p) / (p.mass_kg * x.v_mps);
}

DiscreteScalarModel discretize(double a11, double Ts_s) {
  if (!(Ts_s > 0.0)) throw InvalidInput("discretize: Ts must be > 0");
  DiscreteScalarModel m;
  m.a_d = std::exp(-a11 * Ts_s);
  // (1 - e^{-a Ts}) / a, written with expm1 to stay accurate for small a Ts
  m.b_d = std::abs(a11) > 1e-12 ? -std::expm1(-a11 * Ts_s) / a11 : Ts_s;
  return m;
}

double dare_solution(const DiscreteScalarModel& model, const DsdreWeights& w) {
  const double a = model.a_d;
  const double b = model.b_d;
  if (b == 0.0) throw Uncontrollable("dsdre_gain: b_d = 0");
  const double A = b * b;
  const double B = w.r - w.r * a * a - w.q * b * b;
  const double C = -w.q * w.r;
  // positive root; C <= 0 so the discriminant is >= B^2. Pick the cancellation-free form.
  const double disc = std::sqrt(B * B - 4.0 * A * C);
  if (C == 0.0) return B >= 0.0 ? 0.0 : -B / A;
  return B >= 0.0 ? (2.0 * C) / (-B - disc) : (-B + disc) / (2.0 * A);
}

double dsdre_gain(const DiscreteScalarModel& model, const DsdreWeights& w) {
  const double P = dare_solution(model, w);
  const double b = model.b_d;
  return b * P * model.a_d / (w.r + b * b * P);
}

double nominal_control(const AgentState& x, const AgentParams& p, const DsdreWeights& w) {
  const DiscreteScalarModel model = discretize(sdre_factor(x, p, w.v_thld_mps), w.Ts_s);
  return -dsdre_gain(model, w) * (x.v_mps - p.v_ref_mps);
}

void ControllerConfig::validate() const {
  const std::size_t n = agents.size();
  if (n == 0) throw InvalidInput("controller: no agents");
  if (paths.size() != n || weights.size() != n)
    throw InvalidInput("controller: agents, paths and weights must have equal length");
  gains.validate();
  smooth.validate();
  for (const AgentParams& p : agents) icbf::validate(p, gains.lambda_lo);
  for (const DsdreWeights& w : weights) w.validate();
  if (graph.agent_count != static_cast<int>(n)) throw InvalidInput("controller: conflict graph size mismatch");
}

std::vector<CollisionPair> ControllerConfig::collision_pairs() const {
  std::vector<CollisionPair> out;
  for (int i = 0; i < agent_count(); ++i) {
    for (int j : graph.conflict_set(i)) {
      CollisionPair pair;
      pair.geometry.i = i;
      pair.geometry.j = j;
      pair.geometry.path_i = paths[i];
      pair.geometry.path_j = paths[j];
      pair.geometry.ellipse = ellipse_axes(agents[i], paths[i].heading_rad(), agents[j],
                                           paths[j].heading_rad(), buffer_a_m, buffer_b_m);
      pair.params_i = agents[i];
      pair.params_j = agents[j];
      out.push_back(pair);
    }
  }
  return out;
}

CoordinationController::CoordinationController(ControllerConfig cfg, QpConfig qp_cfg)
    : cfg_(std::move(cfg)), solver_(qp_cfg) {
  cfg_.validate();
  pairs_ = cfg_.collision_pairs();
}

std::vector<ConstraintRow> CoordinationController::assemble_rows(const StackedState& x) const {
  const int n = cfg_.agent_count();
  if (static_cast<int>(x.size()) != n) throw InvalidInput("controller: state size mismatch");
  std::vector<ConstraintRow> rows;
  rows.reserve(2 * n + pairs_.size());
  for (int i = 0; i < n; ++i) {
    auto [lo, hi] = velocity_cbf_rows(i, n, x[i], cfg_.agents[i], cfg_.gains);
    rows.push_back(std::move(lo));
    rows.push_back(std::move(hi));
  }
  for (const CollisionPair& pair : pairs_)
    rows.push_back(collision_cbf_row(x, pair, n, cfg_.gains, cfg_.smooth));
  return rows;
}

std::vector<double> CoordinationController::nominal(const StackedState& x) const {
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = nominal_control(x[i], cfg_.agents[i], cfg_.weights[i]);
  return u;
}

ControlDecision CoordinationController::step(const StackedState& x) {
  ControlDecision dec;
  dec.u_nom = nominal(x);
  dec.rows = assemble_rows(x);

  QpProblem qp;
  qp.u_nom = dec.u_nom;
  qp.rows = dec.rows;
  for (const AgentParams& p : cfg_.agents) {
    qp.lb.push_back(p.u_min_mps2);
    qp.ub.push_back(p.u_max_mps2);
  }
  const auto t0 = std::chrono::steady_clock::now();
  dec.qp = solver_.solve(qp);
  dec.timing_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  dec.u_star = dec.qp.u_star;
  return dec;
}

ControlDecision control_step(const StackedState& x, const ControllerConfig& cfg) {
  CoordinationController controller(cfg, QpConfig{.feasibility_tol = 1e-11, .warm_start = false});
  ControlDecision dec = controller.step(x);
  if (dec.qp.status != QpStatus::optimal)
    throw QpInfeasible("centralized barrier QP returned status " + std::string(to_string(dec.qp.status)));
  return dec;
}

}  // namespace icbf
