#pragma once

#include <string_view>
#include <vector>

#include "icbf/constraint_row.hpp"

namespace icbf {

/// minimize 1/2 |u - u_nom|^2  s.t.  rows[k].coeffs . u >= rows[k].rhs_floor,  lb <= u <= ub
struct QpProblem {
  std::vector<double> u_nom;
  std::vector<ConstraintRow> rows;
  std::vector<double> lb;
  std::vector<double> ub;

  std::size_t size() const { return u_nom.size(); }
  /// Throws InvalidInput on mismatched sizes, lb >= ub or non-finite data.
  void validate() const;
};

enum class QpStatus { optimal, infeasible, max_iter };

std::string_view to_string(QpStatus status);

struct QpConfig {
  double feasibility_tol = 1e-11;
  bool warm_start = true;
};

/// Constraint indices in `active_set` are unified: [0, m) are rows, [m, m+n)
/// lower bounds, [m+n, m+2n) upper bounds.
struct QpSolution {
  std::vector<double> u_star;
  QpStatus status = QpStatus::infeasible;
  double kkt_residual = 0.0;
  std::vector<int> active_set;
  int iterations = 0;
  std::vector<double> row_multipliers;
  std::vector<double> lower_multipliers;
  std::vector<double> upper_multipliers;
};

struct KktReport {
  double stationarity = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double complementarity = 0.0;

  double worst() const;
};

KktReport verify_kkt(const QpProblem& qp, const QpSolution& sol);

/// Dual active-set solver for the min-norm projection QP. Holds the last
/// active set to warm start the next solve; use one instance per thread.
class QpSolver {
 public:
  explicit QpSolver(QpConfig cfg = {}) : cfg_(cfg) {}

  QpSolution solve(const QpProblem& qp);
  void clear_warm_start() { warm_active_.clear(); }
  const QpConfig& config() const { return cfg_; }

 private:
  QpConfig cfg_;
  std::vector<int> warm_active_;
};

/// Stateless convenience wrapper (cold start).
QpSolution solve_qp(const QpProblem& qp, const QpConfig& cfg = {});

}  // namespace icbf
