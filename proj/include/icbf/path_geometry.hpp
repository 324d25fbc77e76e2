#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "icbf/vehicle_dynamics.hpp"

namespace icbf {

using Vec2 = Eigen::Vector2d;

/// Straight path P(s) = origin + direction * s with constant heading.
/// `direction` is a unit vector, so s is arc length; s ranges over [0, length_m].
struct LinearPath {
  Vec2 origin = Vec2::Zero();
  Vec2 direction = Vec2::UnitX();
  double length_m = 0.0;

  double heading_rad() const;

  /// Builds a path from a start point and a (not necessarily normalized) direction.
  /// Throws InvalidInput on a zero direction.
  static LinearPath from_start(const Vec2& start, const Vec2& direction, double length_m);
};

Vec2 path_point(const LinearPath& path, double s);

/// Rotation R(psi) taking body-frame vectors to the global frame.
Eigen::Matrix2d rotation(double psi);

/// Quartic keep-out region (x/a)^4 + (y/b)^4 <= 1 in Agent i's body frame.
struct SuperellipseSpec {
  double a_m = 1.0;
  double b_m = 1.0;
};

/// (x/a)^4 + (y/b)^4 - 1; zero exactly on the boundary.
double superellipse_value(const Vec2& point_body, const SuperellipseSpec& spec);

/// Semi-axes a_i(j), b_i(j) of Agent i's superellipse against Agent j.
/// Throws InvalidInput when either resulting axis is not positive.
SuperellipseSpec ellipse_axes(const AgentParams& pi, double heading_i, const AgentParams& pj,
                              double heading_j, double buffer_a_m, double buffer_b_m);

/// Distance from the superellipse center to its boundary along `dir_body`:
/// the unique positive root nu of SE(nu * dir) = 0, in closed form
/// nu = (ux^4/a^4 + uy^4/b^4)^(-1/4). The direction is normalized first;
/// a zero vector throws InvalidInput.
double boundary_scale_nu(const Vec2& dir_body, const SuperellipseSpec& spec);

/// Geometry of an ordered pair (i, j): Agent i owns the superellipse.
struct PairGeometry {
  int i = 0;
  int j = 1;
  LinearPath path_i;
  LinearPath path_j;
  SuperellipseSpec ellipse;
};

/// Separation distance d_ij, its rate v_ij and the partial derivatives the
/// barrier functions need. All derivatives are analytic.
struct SeparationJet {
  double range_m = 0.0;               // |P_j - P_i|
  Vec2 offset_body = Vec2::Zero();    // R(psi_i)^T (P_j - P_i)
  double nu_m = 0.0;
  double d_m = 0.0;

  double dd_dsi = 0.0;
  double dd_dsj = 0.0;
  double d2d_dsi2 = 0.0;
  double d2d_dsidsj = 0.0;
  double d2d_dsj2 = 0.0;

  double v_ij = 0.0;
  double dvij_dvi = 0.0;
  double dvij_dvj = 0.0;
  double dvij_dsi = 0.0;
  double dvij_dsj = 0.0;
};

/// Throws CoincidentCenters when |P_j - P_i| < 1e-9 m.
SeparationJet separation_jet(const AgentState& xi, const AgentState& xj, const PairGeometry& g);

/// |P_j - P_i| - nu along the body-frame direction from P_i to P_j.
/// Negative iff Agent j's center lies strictly inside Agent i's superellipse.
double separation_distance(const StackedState& x, const PairGeometry& g);

/// Time derivative of separation_distance along the flow (ds/dt = v).
double separation_rate(const StackedState& x, const PairGeometry& g);

/// Undirected conflict graph over 0-based agent indices.
struct ConflictGraph {
  int agent_count = 0;
  std::vector<std::pair<int, int>> edges;  // first < second, sorted

  bool has_edge(int i, int j) const;
  /// {j : (i, j) in E and j > i}
  std::vector<int> conflict_set(int i) const;
};

/// Edge (i, j) iff some pair of points of the two path segments brings Agent j's
/// center within `margin_m` of Agent i's superellipse (or vice versa).
ConflictGraph build_conflict_graph(std::span<const LinearPath> paths,
                                   std::span<const AgentParams> params, double buffer_a_m,
                                   double buffer_b_m, double margin_m);

/// Smallest separation distance over s_i in [0, L_i], s_j in [0, L_j].
/// Returns -infinity if the centers can coincide.
double min_separation_over_paths(const PairGeometry& g);

}  // namespace icbf
