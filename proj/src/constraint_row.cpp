#include "icbf/constraint_row.hpp"

namespace icbf {

std::string cbf_name(CbfKind kind, int agent_i, int agent_j) {
  switch (kind) {
    case CbfKind::velocity_lower: return "h_vlo_" + std::to_string(agent_i + 1);
    case CbfKind::velocity_upper: return "h_vhi_" + std::to_string(agent_i + 1);
    case CbfKind::collision:
      return "h_c_" + std::to_string(agent_i + 1) + std::to_string(agent_j + 1);
  }
  return "h_?";
}

std::string ConstraintRow::name() const { return cbf_name(kind, agent_i, agent_j); }

double ConstraintRow::slack(std::span<const double> u) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs.size() && k < u.size(); ++k) acc += coeffs[k] * u[k];
  return acc - rhs_floor;
}

}  // namespace icbf
