#include "icbf/safety.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

constexpr std::size_t kMaxFailureMessages = 50;

std::array<Vec2, 2> box_axes(const OrientedBox& b) {
  const Vec2 e(std::cos(b.heading_rad), std::sin(b.heading_rad));
  return {e, Vec2(-e.y(), e.x())};
}

// half-extent of the box projected on a unit axis
double projected_radius(const OrientedBox& b, const Vec2& axis) {
  const auto ax = box_axes(b);
  return 0.5 * b.length_m * std::abs(ax[0].dot(axis)) + 0.5 * b.width_m * std::abs(ax[1].dot(axis));
}

double lambda_for(const std::string& name, const CbfGains& g) {
  if (name.rfind("h_vlo_", 0) == 0) return g.lambda_lo;
  if (name.rfind("h_vhi_", 0) == 0) return g.lambda_hi;
  return g.lambda_c;
}

}  // namespace

bool obb_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 delta = b.center - a.center;
  const auto aa = box_axes(a);
  const auto bb = box_axes(b);
  for (const Vec2& axis : {aa[0], aa[1], bb[0], bb[1]}) {
    if (std::abs(delta.dot(axis)) > projected_radius(a, axis) + projected_radius(b, axis)) return false;
  }
  return true;
}

ObbReport obb_collision_oracle(const SimTrace& trace, std::span<const AgentConfig> agents) {
  ObbReport rep;
  const int n = static_cast<int>(agents.size());
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const StepRecord& rec = trace.steps[k];
    ++rep.steps_checked;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        ++rep.pair_checks;
        const OrientedBox bi{rec.position.at(i), agents[i].path.heading_rad(), agents[i].params.length_m,
                             agents[i].params.width_m};
        const OrientedBox bj{rec.position.at(j), agents[j].path.heading_rad(), agents[j].params.length_m,
                             agents[j].params.width_m};
        if (obb_overlap(bi, bj)) rep.overlaps.push_back({k, rec.t_s, i, j});
      }
    }
  }
  return rep;
}

bool SafetyReport::clean() const {
  return !aborted && h_violations == 0 && comparison_violations == 0 && input_violations == 0 &&
         qp_failures == 0 && obb.clean();
}

SafetyReport verify_invariants(const SimTrace& trace, const ScenarioConfig& cfg, const VerifyTolerances& tol) {
  SafetyReport rep;
  rep.scenario = trace.scenario.empty() ? cfg.name : trace.scenario;
  rep.steps = trace.steps.size();
  rep.aborted = trace.aborted;
  rep.abort_reason = trace.abort_reason;

  auto note = [&](const std::string& msg) {
    if (rep.failures.size() < kMaxFailureMessages) rep.failures.push_back(msg);
  };

  if (trace.agent_count != cfg.agent_count())
    throw InvalidInput("trace has " + std::to_string(trace.agent_count) + " agents, scenario has " +
                       std::to_string(cfg.agent_count()));
  const std::vector<std::string> expected = cbf_columns(cfg.controller_config());
  if (expected != trace.cbf_names) {
    std::string got;
    for (const auto& s : trace.cbf_names) got += s + " ";
    throw InvalidInput("trace barrier columns do not match the scenario (got: " + got + ")");
  }

  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < trace.cbf_names.size(); ++c) {
    CbfSummary s;
    s.name = trace.cbf_names[c];
    s.min_h = inf;
    s.min_comparison_margin = inf;
    const double decay = 1.0 - lambda_for(s.name, cfg.gains) * cfg.Ts_s;
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
      const StepRecord& rec = trace.steps[k];
      const double h = rec.h.at(c);
      if (h < s.min_h || std::isnan(h)) {
        s.min_h = h;
        s.t_min_h = rec.t_s;
      }
      if (!(h >= tol.h_floor)) {
        ++rep.h_violations;
        std::ostringstream os;
        os << s.name << " = " << h << " at t=" << rec.t_s << " (step " << k << ")";
        note(os.str());
      }
      if (k + 1 < trace.steps.size()) {
        const double margin = trace.steps[k + 1].h.at(c) - decay * h;
        if (margin < s.min_comparison_margin || std::isnan(margin)) {
          s.min_comparison_margin = margin;
          s.t_min_margin = rec.t_s;
        }
        if (!(margin >= -tol.comparison_slack)) {
          ++rep.comparison_violations;
          std::ostringstream os;
          os << s.name << " decays faster than the comparison bound by " << -margin << " between t=" << rec.t_s
             << " and t=" << trace.steps[k + 1].t_s;
          note(os.str());
        }
      }
    }
    rep.cbfs.push_back(s);
  }

  double time_sum = 0.0;
  std::size_t timed = 0;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const StepRecord& rec = trace.steps[k];
    for (int i = 0; i < cfg.agent_count() && static_cast<std::size_t>(i) < rec.u.size(); ++i) {
      const AgentParams& p = cfg.agents[i].params;
      if (!(rec.u[i] >= p.u_min_mps2 - tol.input_tol && rec.u[i] <= p.u_max_mps2 + tol.input_tol)) {
        ++rep.input_violations;
        std::ostringstream os;
        os << "u_" << i + 1 << " = " << rec.u[i] << " outside [" << p.u_min_mps2 << ", " << p.u_max_mps2
           << "] at t=" << rec.t_s;
        note(os.str());
      }
    }
    if (!rec.qp_known) {
      ++rep.qp_unknown;
      continue;
    }
    if (rec.status != QpStatus::optimal) {
      ++rep.qp_failures;
      note("barrier QP " + std::string(to_string(rec.status)) + " at t=" + std::to_string(rec.t_s));
    }
    time_sum += rec.solve_time_s;
    rep.qp_time_max_s = std::max(rep.qp_time_max_s, rec.solve_time_s);
    ++timed;
  }
  if (timed > 0) rep.qp_time_mean_s = time_sum / static_cast<double>(timed);

  rep.obb = obb_collision_oracle(trace, cfg.agents);
  for (const OverlapEvent& ev : rep.obb.overlaps) {
    std::ostringstream os;
    os << "footprints of agents " << ev.agent_i + 1 << " and " << ev.agent_j + 1 << " overlap at t=" << ev.t_s;
    note(os.str());
  }
  if (rep.aborted) note("run aborted: " + rep.abort_reason);
  return rep;
}

}  // namespace icbf
