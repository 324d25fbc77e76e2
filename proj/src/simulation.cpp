#include "icbf/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "icbf/coordination_controller.hpp"
#include "icbf/errors.hpp"

namespace icbf {

namespace {

StepRecord make_record(double t, const StackedState& x, const ControllerConfig& cc) {
  StepRecord rec;
  rec.t_s = t;
  rec.x = x;
  for (int i = 0; i < cc.agent_count(); ++i) rec.position.push_back(path_point(cc.paths[i], x[i].s_m));
  for (const BarrierValue& b : barrier_values(x, cc)) rec.h.push_back(b.h);
  return rec;
}

void fill_qp(StepRecord& rec, const ControlDecision& dec) {
  rec.status = dec.qp.status;
  rec.iterations = dec.qp.iterations;
  rec.kkt_residual = dec.qp.kkt_residual;
  rec.solve_time_s = dec.timing_s;
  rec.qp_known = true;
}

}  // namespace

std::vector<std::string> cbf_columns(const ControllerConfig& cfg) {
  std::vector<std::string> names;
  for (int i = 0; i < cfg.agent_count(); ++i) {
    names.push_back(cbf_name(CbfKind::velocity_lower, i));
    names.push_back(cbf_name(CbfKind::velocity_upper, i));
  }
  for (const CollisionPair& p : cfg.collision_pairs())
    names.push_back(cbf_name(CbfKind::collision, p.geometry.i, p.geometry.j));
  return names;
}

SimTrace run(const ScenarioConfig& cfg) {
  const ControllerConfig cc = cfg.controller_config();
  CoordinationController controller(cc);
  const std::vector<AgentParams> params = cfg.params();

  SimTrace trace;
  trace.scenario = cfg.name;
  trace.agent_count = cfg.agent_count();
  trace.cbf_names = cbf_columns(cc);

  const long samples = std::lround(cfg.duration_s / cfg.Ts_s);
  trace.steps.reserve(static_cast<std::size_t>(samples) + 1);
  StackedState x = cfg.initial_state();

  for (long k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) * cfg.Ts_s;
    StepRecord rec = make_record(t, x, cc);
    ControlDecision dec;
    try {
      dec = controller.step(x);
    } catch (const Error& e) {
      trace.steps.push_back(std::move(rec));
      trace.aborted = true;
      trace.abort_reason = "t=" + std::to_string(t) + ": " + e.what();
      spdlog::warn("run aborted: {}", trace.abort_reason);
      return trace;
    }
    rec.u_nom = dec.u_nom;
    rec.u = dec.u_star;
    fill_qp(rec, dec);
    spdlog::debug("t={:.2f} status={} iters={} solve={:.1f}us", t, to_string(dec.qp.status), dec.qp.iterations,
                  dec.timing_s * 1e6);
    trace.steps.push_back(std::move(rec));

    if (dec.qp.status != QpStatus::optimal) {
      trace.aborted = true;
      trace.abort_reason = "t=" + std::to_string(t) + ": barrier QP " + std::string(to_string(dec.qp.status));
      spdlog::warn("run aborted: {}", trace.abort_reason);
      return trace;
    }
    if (k == samples) break;
    try {
      x = integrate_step(x, dec.u_star, params, cfg.Ts_s, cfg.substeps);
    } catch (const IntegrationDiverged& e) {
      trace.aborted = true;
      trace.abort_reason = "t=" + std::to_string(t) + ": " + e.what();
      spdlog::warn("run aborted: {}", trace.abort_reason);
      return trace;
    }
  }
  return trace;
}

double replay_controller(SimTrace& trace, const ScenarioConfig& cfg) {
  const ControllerConfig cc = cfg.controller_config();
  CoordinationController controller(cc);
  double worst = 0.0;
  for (StepRecord& rec : trace.steps) {
    const StepRecord fresh = make_record(rec.t_s, rec.x, cc);
    for (std::size_t k = 0; k < fresh.h.size() && k < rec.h.size(); ++k) {
      const double a = rec.h[k];
      const double b = fresh.h[k];
      if (std::isfinite(a) && std::isfinite(b)) worst = std::max(worst, std::abs(a - b));
      else if (std::isfinite(a) != std::isfinite(b)) worst = std::numeric_limits<double>::infinity();
    }
    try {
      fill_qp(rec, controller.step(rec.x));
    } catch (const Error&) {
      rec.status = QpStatus::infeasible;
      rec.qp_known = true;
    }
  }
  return worst;
}

}  // namespace icbf
