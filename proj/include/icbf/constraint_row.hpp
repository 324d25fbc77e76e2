#pragma once

#include <span>
#include <string>
#include <vector>

namespace icbf {

enum class CbfKind { velocity_lower, velocity_upper, collision };

/// One barrier condition L_f h + L_g h u + lambda h >= 0, stored as
/// coeffs . u >= rhs_floor with coeffs = L_g h and rhs_floor = -L_f h - lambda h.
struct ConstraintRow {
  std::vector<double> coeffs;
  double rhs_floor = 0.0;
  double h_value = 0.0;
  double lambda = 0.0;
  CbfKind kind = CbfKind::velocity_lower;
  int agent_i = 0;   // 0-based
  int agent_j = -1;  // collision rows only

  /// Column label used in traces: h_vlo_<i>, h_vhi_<i> or h_c_<i><j> (1-based ids).
  std::string name() const;

  /// coeffs . u - rhs_floor; non-negative iff the row is satisfied.
  double slack(std::span<const double> u) const;
};

std::string cbf_name(CbfKind kind, int agent_i, int agent_j = -1);

}  // namespace icbf
