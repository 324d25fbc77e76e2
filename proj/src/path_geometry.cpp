#include "icbf/path_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

constexpr double kCoincidentTol = 1e-9;

// Value, gradient and Hessian of d(w) = |w| - nu(w/|w|) with respect to the
// body-frame offset w. Using the homogeneity of the gauge, nu(w/|w|) = |w| T(w)
// with T = S^(-1/4), S = wx^4/a^4 + wy^4/b^4.
struct DistanceDerivs {
  double r = 0.0;
  double nu = 0.0;
  double d = 0.0;
  Vec2 grad = Vec2::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

DistanceDerivs distance_derivs(const Vec2& w, const SuperellipseSpec& e) {
  DistanceDerivs out;
  const double r = w.norm();
  const double a4 = std::pow(e.a_m, 4);
  const double b4 = std::pow(e.b_m, 4);
  const double wx = w.x();
  const double wy = w.y();
  const double S = wx * wx * wx * wx / a4 + wy * wy * wy * wy / b4;
  const double T = std::pow(S, -0.25);

  const Vec2 grad_r = w / r;
  const Eigen::Matrix2d hess_r = (Eigen::Matrix2d::Identity() - grad_r * grad_r.transpose()) / r;
  const Vec2 grad_S(4.0 * wx * wx * wx / a4, 4.0 * wy * wy * wy / b4);
  Eigen::Matrix2d hess_S = Eigen::Matrix2d::Zero();
  hess_S(0, 0) = 12.0 * wx * wx / a4;
  hess_S(1, 1) = 12.0 * wy * wy / b4;

  const double S_m54 = std::pow(S, -1.25);
  const Vec2 grad_T = -0.25 * S_m54 * grad_S;
  const Eigen::Matrix2d hess_T =
      (5.0 / 16.0) * std::pow(S, -2.25) * grad_S * grad_S.transpose() - 0.25 * S_m54 * hess_S;

  out.r = r;
  out.nu = r * T;
  out.d = r - out.nu;
  out.grad = (1.0 - T) * grad_r - r * grad_T;
  out.hess = (1.0 - T) * hess_r - grad_r * grad_T.transpose() - grad_T * grad_r.transpose() -
             r * hess_T;
  return out;
}

Vec2 body_offset(const Vec2& global_offset, const LinearPath& owner) {
  // R(psi)^T v with (cos psi, sin psi) = owner.direction
  const Vec2& e = owner.direction;
  return {e.x() * global_offset.x() + e.y() * global_offset.y(),
          -e.y() * global_offset.x() + e.x() * global_offset.y()};
}

double separation_at(const PairGeometry& g, double si, double sj) {
  const Vec2 D = path_point(g.path_j, sj) - path_point(g.path_i, si);
  const double r = D.norm();
  if (r < kCoincidentTol) return -std::numeric_limits<double>::infinity();
  return r - boundary_scale_nu(body_offset(D, g.path_i), g.ellipse);
}

// Minimum of separation_at along a segment of the (s_i, s_j) rectangle boundary.
double min_along_edge(const PairGeometry& g, double si0, double sj0, double si1, double sj1) {
  constexpr int kSamples = 4000;
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = static_cast<double>(k) / kSamples;
    const double v = separation_at(g, si0 + t * (si1 - si0), sj0 + t * (sj1 - sj0));
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  if (!std::isfinite(best)) return best;
  // golden-section refinement on the bracketing sample interval
  double lo = std::max(0, best_k - 1) / static_cast<double>(kSamples);
  double hi = std::min(kSamples, best_k + 1) / static_cast<double>(kSamples);
  auto f = [&](double t) { return separation_at(g, si0 + t * (si1 - si0), sj0 + t * (sj1 - sj0)); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - phi * (hi - lo);
    const double m2 = lo + phi * (hi - lo);
    if (f(m1) < f(m2)) hi = m2; else lo = m1;
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

}  // namespace

double LinearPath::heading_rad() const { return std::atan2(direction.y(), direction.x()); }

LinearPath LinearPath::from_start(const Vec2& start, const Vec2& dir, double length_m) {
  const double n = dir.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("path direction must be a non-zero vector");
  LinearPath p;
  p.origin = start;
  p.direction = dir / n;
  p.length_m = length_m;
  return p;
}

Vec2 path_point(const LinearPath& path, double s) { return path.origin + path.direction * s; }

Eigen::Matrix2d rotation(double psi) {
  Eigen::Matrix2d R;
  R << std::cos(psi), -std::sin(psi), std::sin(psi), std::cos(psi);
  return R;
}

double superellipse_value(const Vec2& p, const SuperellipseSpec& spec) {
  return std::pow(p.x() / spec.a_m, 4) + std::pow(p.y() / spec.b_m, 4) - 1.0;
}

SuperellipseSpec ellipse_axes(const AgentParams& pi, double heading_i, const AgentParams& pj,
                              double heading_j, double buffer_a_m, double buffer_b_m) {
  if (buffer_a_m < 0.0 || buffer_b_m < 0.0) throw InvalidInput("safety buffers must be >= 0");
  const Eigen::Matrix2d R = rotation(heading_j - heading_i);
  SuperellipseSpec spec;
  spec.a_m = pi.length_m / 2.0 + (R * Vec2(pj.length_m / 2.0, 0.0)).norm() + buffer_a_m;
  spec.b_m = pi.width_m / 2.0 + (R * Vec2(0.0, pj.width_m / 2.0)).norm() + buffer_b_m;
  if (!(spec.a_m > 0.0) || !(spec.b_m > 0.0))
    throw InvalidInput("superellipse axes must be positive (a=" + std::to_string(spec.a_m) +
                       ", b=" + std::to_string(spec.b_m) + ")");
  return spec;
}

double boundary_scale_nu(const Vec2& dir_body, const SuperellipseSpec& spec) {
  const double n = dir_body.norm();
  if (!(n > 0.0)) throw InvalidInput("boundary_scale_nu: zero direction");
  const double ux = dir_body.x() / n;
  const double uy = dir_body.y() / n;
  const double S = std::pow(ux / spec.a_m, 4) + std::pow(uy / spec.b_m, 4);
  return std::pow(S, -0.25);
}

SeparationJet separation_jet(const AgentState& xi, const AgentState& xj, const PairGeometry& g) {
  const Vec2 D = path_point(g.path_j, xj.s_m) - path_point(g.path_i, xi.s_m);
  if (D.norm() < kCoincidentTol)
    throw CoincidentCenters("agents " + std::to_string(g.i + 1) + " and " + std::to_string(g.j + 1) +
                            " have coincident centers");
  const Vec2 w = body_offset(D, g.path_i);
  const DistanceDerivs dd = distance_derivs(w, g.ellipse);

  // dw/ds_i = -R^T e_i = -(1, 0); dw/ds_j = R^T e_j
  const Vec2 ei = body_offset(g.path_i.direction, g.path_i);
  const Vec2 ej = body_offset(g.path_j.direction, g.path_i);

  SeparationJet jet;
  jet.range_m = dd.r;
  jet.offset_body = w;
  jet.nu_m = dd.nu;
  jet.d_m = dd.d;
  jet.dd_dsi = -dd.grad.dot(ei);
  jet.dd_dsj = dd.grad.dot(ej);
  jet.d2d_dsi2 = ei.dot(dd.hess * ei);
  jet.d2d_dsidsj = -ei.dot(dd.hess * ej);
  jet.d2d_dsj2 = ej.dot(dd.hess * ej);

  jet.v_ij = jet.dd_dsi * xi.v_mps + jet.dd_dsj * xj.v_mps;
  jet.dvij_dvi = jet.dd_dsi;
  jet.dvij_dvj = jet.dd_dsj;
  jet.dvij_dsi = jet.d2d_dsi2 * xi.v_mps + jet.d2d_dsidsj * xj.v_mps;
  jet.dvij_dsj = jet.d2d_dsidsj * xi.v_mps + jet.d2d_dsj2 * xj.v_mps;
  return jet;
}

double separation_distance(const StackedState& x, const PairGeometry& g) {
  const Vec2 D = path_point(g.path_j, x.at(g.j).s_m) - path_point(g.path_i, x.at(g.i).s_m);
  const double r = D.norm();
  if (r < kCoincidentTol)
    throw CoincidentCenters("agents " + std::to_string(g.i + 1) + " and " + std::to_string(g.j + 1) +
                            " have coincident centers");
  return r - boundary_scale_nu(body_offset(D, g.path_i), g.ellipse);
}

double separation_rate(const StackedState& x, const PairGeometry& g) {
  return separation_jet(x.at(g.i), x.at(g.j), g).v_ij;
}

bool ConflictGraph::has_edge(int i, int j) const {
  const auto key = std::minmax(i, j);
  return std::find(edges.begin(), edges.end(), std::pair<int, int>{key.first, key.second}) != edges.end();
}

std::vector<int> ConflictGraph::conflict_set(int i) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges)
    if (a == i) out.push_back(b);
  return out;
}

double min_separation_over_paths(const PairGeometry& g) {
  // D(s_i, s_j) spans a parallelogram. The sublevel sets of d are star-shaped
  // about D = 0, so unless the parallelogram contains the origin the minimum
  // of d is attained on its boundary.
  const Vec2 p0 = g.path_j.origin - g.path_i.origin;
  const Vec2& ei = g.path_i.direction;
  const Vec2& ej = g.path_j.direction;
  const double Li = g.path_i.length_m;
  const double Lj = g.path_j.length_m;
  Eigen::Matrix2d M;
  M.col(0) = -ei;
  M.col(1) = ej;
  if (std::abs(M.determinant()) > 1e-12) {
    const Vec2 s = M.inverse() * (-p0);
    if (s.x() >= 0.0 && s.x() <= Li && s.y() >= 0.0 && s.y() <= Lj)
      return -std::numeric_limits<double>::infinity();
  }
  double best = std::numeric_limits<double>::infinity();
  best = std::min(best, min_along_edge(g, 0.0, 0.0, Li, 0.0));
  best = std::min(best, min_along_edge(g, 0.0, Lj, Li, Lj));
  best = std::min(best, min_along_edge(g, 0.0, 0.0, 0.0, Lj));
  best = std::min(best, min_along_edge(g, Li, 0.0, Li, Lj));
  return best;
}

ConflictGraph build_conflict_graph(std::span<const LinearPath> paths, std::span<const AgentParams> params,
                                   double buffer_a_m, double buffer_b_m, double margin_m) {
  if (paths.size() != params.size()) throw InvalidInput("build_conflict_graph: paths/params size mismatch");
  if (paths.size() < 2) throw InvalidInput("build_conflict_graph: need at least 2 agents");
  ConflictGraph graph;
  graph.agent_count = static_cast<int>(paths.size());
  for (int i = 0; i < graph.agent_count; ++i) {
    for (int j = i + 1; j < graph.agent_count; ++j) {
      bool conflict = false;
      for (const auto& [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        PairGeometry g;
        g.i = a;
        g.j = b;
        g.path_i = paths[a];
        g.path_j = paths[b];
        g.ellipse = ellipse_axes(params[a], paths[a].heading_rad(), params[b], paths[b].heading_rad(),
                                 buffer_a_m, buffer_b_m);
        if (min_separation_over_paths(g) < margin_m) conflict = true;
      }
      if (conflict) graph.edges.emplace_back(i, j);
    }
  }
  return graph;
}

}  // namespace icbf
