#include "icbf/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// All inequality constraints in the form C.col(k) . u >= b(k).
struct ConstraintSet {
  MatrixXd C;
  VectorXd b;
  VectorXd norm;  // |C.col(k)|
};

ConstraintSet gather(const QpProblem& qp) {
  const int n = static_cast<int>(qp.size());
  const int m = static_cast<int>(qp.rows.size());
  ConstraintSet cs;
  cs.C = MatrixXd::Zero(n, m + 2 * n);
  cs.b.resize(m + 2 * n);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) cs.C(i, k) = qp.rows[k].coeffs[i];
    cs.b(k) = qp.rows[k].rhs_floor;
  }
  for (int i = 0; i < n; ++i) {
    cs.C(i, m + i) = 1.0;
    cs.b(m + i) = qp.lb[i];
    cs.C(i, m + n + i) = -1.0;
    cs.b(m + n + i) = -qp.ub[i];
  }
  cs.norm = cs.C.colwise().norm().transpose();
  return cs;
}

// Step direction for adding constraint p with normal np to active set A:
// z is the component of np orthogonal to the active normals, r the
// coefficients of np in the active normals.
struct Direction {
  VectorXd z;
  VectorXd r;
};

Direction direction(const ConstraintSet& cs, const std::vector<int>& active, const VectorXd& np) {
  const int n = static_cast<int>(np.size());
  const int q = static_cast<int>(active.size());
  Direction d;
  if (q == 0) {
    d.z = np;
    d.r.resize(0);
    return d;
  }
  MatrixXd N(n, q);
  for (int k = 0; k < q; ++k) N.col(k) = cs.C.col(active[k]);
  const Eigen::HouseholderQR<MatrixXd> qr(N);
  const MatrixXd Q = qr.householderQ();
  const MatrixXd R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
  const VectorXd q1 = Q.leftCols(q).transpose() * np;
  d.r = R.triangularView<Eigen::Upper>().solve(q1);
  if (q < n) {
    const MatrixXd Q2 = Q.rightCols(n - q);
    d.z = Q2 * (Q2.transpose() * np);
  } else {
    d.z = VectorXd::Zero(n);
  }
  return d;
}

struct ActiveState {
  VectorXd x;
  std::vector<int> active;
  std::vector<double> lambda;
};

ActiveState cold_start(const QpProblem& qp, const VectorXd& u_nom) {
  const int n = static_cast<int>(qp.size());
  const int m = static_cast<int>(qp.rows.size());
  ActiveState s;
  s.x = u_nom;
  for (int i = 0; i < n; ++i) {
    if (u_nom(i) < qp.lb[i]) {
      s.x(i) = qp.lb[i];
      s.active.push_back(m + i);
      s.lambda.push_back(qp.lb[i] - u_nom(i));
    } else if (u_nom(i) > qp.ub[i]) {
      s.x(i) = qp.ub[i];
      s.active.push_back(m + n + i);
      s.lambda.push_back(u_nom(i) - qp.ub[i]);
    }
  }
  return s;
}

// Equality-constrained projection onto the warm active set; accepted only if
// the normals are independent and every multiplier is non-negative.
bool try_warm_start(const ConstraintSet& cs, const VectorXd& u_nom, const std::vector<int>& warm,
                    ActiveState& out) {
  const int n = static_cast<int>(u_nom.size());
  const int K = static_cast<int>(cs.b.size());
  const int q = static_cast<int>(warm.size());
  if (q == 0 || q > n) return false;
  for (int k : warm)
    if (k < 0 || k >= K) return false;
  MatrixXd N(n, q);
  VectorXd bA(q);
  for (int k = 0; k < q; ++k) {
    N.col(k) = cs.C.col(warm[k]);
    bA(k) = cs.b(warm[k]);
  }
  const Eigen::ColPivHouseholderQR<MatrixXd> qr(N);
  if (qr.rank() < q) return false;
  const MatrixXd G = N.transpose() * N;
  const VectorXd lam = G.ldlt().solve(bA - N.transpose() * u_nom);
  if (!lam.allFinite() || lam.minCoeff() < 0.0) return false;
  out.x = u_nom + N * lam;
  out.active = warm;
  out.lambda.assign(lam.data(), lam.data() + q);
  return true;
}

}  // namespace

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max-iter";
  }
  return "unknown";
}

void QpProblem::validate() const {
  const std::size_t n = size();
  if (n == 0) throw InvalidInput("QP: no decision variables");
  if (lb.size() != n || ub.size() != n) throw InvalidInput("QP: bound sizes differ from u_nom");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(u_nom[i]) || !std::isfinite(lb[i]) || !std::isfinite(ub[i]))
      throw InvalidInput("QP: non-finite u_nom or bounds");
    if (!(lb[i] < ub[i])) throw InvalidInput("QP: lb must be < ub componentwise");
  }
  for (const ConstraintRow& row : rows) {
    if (row.coeffs.size() != n) throw InvalidInput("QP: row " + row.name() + " has wrong width");
    if (!std::isfinite(row.rhs_floor)) throw InvalidInput("QP: row " + row.name() + " has non-finite rhs");
    for (double c : row.coeffs)
      if (!std::isfinite(c)) throw InvalidInput("QP: row " + row.name() + " has non-finite coefficient");
  }
}

double KktReport::worst() const {
  return std::max({stationarity, primal_infeasibility, dual_infeasibility, complementarity});
}

KktReport verify_kkt(const QpProblem& qp, const QpSolution& sol) {
  const std::size_t n = qp.size();
  KktReport rep;
  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i)
    grad[i] = sol.u_star[i] - qp.u_nom[i] - sol.lower_multipliers[i] + sol.upper_multipliers[i];
  for (std::size_t k = 0; k < qp.rows.size(); ++k) {
    const ConstraintRow& row = qp.rows[k];
    const double lam = sol.row_multipliers[k];
    for (std::size_t i = 0; i < n; ++i) grad[i] -= lam * row.coeffs[i];
    const double slack = row.slack(sol.u_star);
    rep.primal_infeasibility = std::max(rep.primal_infeasibility, -slack);
    rep.dual_infeasibility = std::max(rep.dual_infeasibility, -lam);
    rep.complementarity = std::max(rep.complementarity, std::abs(lam * slack));
  }
  for (std::size_t i = 0; i < n; ++i) {
    rep.stationarity = std::max(rep.stationarity, std::abs(grad[i]));
    const double lo_slack = sol.u_star[i] - qp.lb[i];
    const double hi_slack = qp.ub[i] - sol.u_star[i];
    rep.primal_infeasibility = std::max({rep.primal_infeasibility, -lo_slack, -hi_slack});
    rep.dual_infeasibility =
        std::max({rep.dual_infeasibility, -sol.lower_multipliers[i], -sol.upper_multipliers[i]});
    rep.complementarity = std::max({rep.complementarity, std::abs(sol.lower_multipliers[i] * lo_slack),
                                    std::abs(sol.upper_multipliers[i] * hi_slack)});
  }
  return rep;
}

QpSolution QpSolver::solve(const QpProblem& qp) {
  qp.validate();
  const int n = static_cast<int>(qp.size());
  const int m = static_cast<int>(qp.rows.size());
  const ConstraintSet cs = gather(qp);
  const VectorXd u_nom = Eigen::Map<const VectorXd>(qp.u_nom.data(), n);
  const int K = m + 2 * n;
  const int max_iter = 50 * (n + m);

  ActiveState st;
  if (!(cfg_.warm_start && try_warm_start(cs, u_nom, warm_active_, st))) st = cold_start(qp, u_nom);

  auto tol = [&](int k) { return cfg_.feasibility_tol * std::max(1.0, cs.norm(k)); };
  auto is_active = [&](int k) { return std::find(st.active.begin(), st.active.end(), k) != st.active.end(); };

  QpSolution sol;
  sol.status = QpStatus::max_iter;
  int iterations = 0;
  bool done = false;
  while (!done && iterations < max_iter) {
    // most violated inactive constraint, lowest index on ties
    int p = -1;
    double worst = 0.0;
    for (int k = 0; k < K; ++k) {
      if (is_active(k)) continue;
      const double s = cs.C.col(k).dot(st.x) - cs.b(k);
      if (s < -tol(k) && s < worst) {
        worst = s;
        p = k;
      }
    }
    if (p < 0) {
      sol.status = QpStatus::optimal;
      break;
    }

    const VectorXd np = cs.C.col(p);
    double lambda_p = 0.0;
    while (true) {
      if (++iterations > max_iter) break;
      const Direction dir = direction(cs, st.active, np);
      const bool dependent = dir.z.norm() <= 1e-12 * std::max(1.0, cs.norm(p));

      // dual step: largest t keeping active multipliers non-negative
      double t1 = kInf;
      int drop = -1;
      for (std::size_t k = 0; k < st.active.size(); ++k) {
        if (dir.r(k) > 1e-14) {
          const double ratio = st.lambda[k] / dir.r(k);
          if (ratio < t1 || (ratio == t1 && st.active[k] < st.active[drop])) {
            t1 = ratio;
            drop = static_cast<int>(k);
          }
        }
      }
      // primal step: t making constraint p active
      double t2 = kInf;
      if (!dependent) {
        const double s = np.dot(st.x) - cs.b(p);
        t2 = -s / dir.z.dot(np);
      }
      const double t = std::min(t1, t2);
      if (t == kInf) {
        sol.status = QpStatus::infeasible;
        done = true;
        break;
      }
      for (std::size_t k = 0; k < st.active.size(); ++k) st.lambda[k] -= t * dir.r(k);
      lambda_p += t;
      if (!dependent) st.x += t * dir.z;

      if (t2 <= t1) {
        st.active.push_back(p);
        st.lambda.push_back(lambda_p);
        break;
      }
      st.active.erase(st.active.begin() + drop);
      st.lambda.erase(st.lambda.begin() + drop);
    }
  }

  sol.iterations = iterations;
  sol.u_star.assign(st.x.data(), st.x.data() + n);
  // an active bound holds with equality; drop the roundoff of the equality solve
  for (int i = 0; i < n; ++i) sol.u_star[i] = std::clamp(sol.u_star[i], qp.lb[i], qp.ub[i]);
  sol.row_multipliers.assign(m, 0.0);
  sol.lower_multipliers.assign(n, 0.0);
  sol.upper_multipliers.assign(n, 0.0);
  for (std::size_t k = 0; k < st.active.size(); ++k) {
    const int idx = st.active[k];
    if (idx < m) sol.row_multipliers[idx] = st.lambda[k];
    else if (idx < m + n) sol.lower_multipliers[idx - m] = st.lambda[k];
    else sol.upper_multipliers[idx - m - n] = st.lambda[k];
  }
  sol.active_set = st.active;
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.kkt_residual = verify_kkt(qp, sol).worst();
  if (sol.status == QpStatus::optimal) warm_active_ = st.active;
  else warm_active_.clear();
  return sol;
}

QpSolution solve_qp(const QpProblem& qp, const QpConfig& cfg) {
  QpConfig c = cfg;
  c.warm_start = false;
  QpSolver solver(c);
  return solver.solve(qp);
}

}  // namespace icbf
