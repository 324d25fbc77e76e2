#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "icbf/errors.hpp"
#include "icbf/qp_solver.hpp"
#include "qp_oracle.hpp"

using Catch::Approx;
using namespace icbf;

namespace {

ConstraintRow row(std::vector<double> a, double b) {
  ConstraintRow r;
  r.coeffs = std::move(a);
  r.rhs_floor = b;
  return r;
}

QpProblem boxed(std::vector<double> u_nom) {
  QpProblem qp;
  qp.lb.assign(u_nom.size(), -3.0);
  qp.ub.assign(u_nom.size(), 3.0);
  qp.u_nom = std::move(u_nom);
  return qp;
}

double dist(const QpProblem& qp, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - qp.u_nom[k]) * (u[k] - qp.u_nom[k]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("unconstrained projection returns u_nom") {
  const QpSolution s = solve_qp(boxed({0.5, -1.0, 2.0}));
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.u_star == std::vector<double>{0.5, -1.0, 2.0});
  CHECK(s.active_set.empty());
}

TEST_CASE("box clamp") {
  const QpProblem qp = boxed({5.0});
  const QpSolution s = solve_qp(qp);
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.u_star[0] == 3.0);
  const KktReport k = verify_kkt(qp, s);
  CHECK(k.worst() <= 1e-15);
  CHECK(s.upper_multipliers[0] == Approx(2.0));
}

TEST_CASE("half-space projection") {
  QpProblem qp = boxed({0.0, 0.0});
  qp.rows.push_back(row({1.0, 1.0}, 2.0));
  const QpSolution s = solve_qp(qp);
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.u_star[0] == Approx(1.0).margin(1e-14));
  CHECK(s.u_star[1] == Approx(1.0).margin(1e-14));
  CHECK(s.row_multipliers[0] == Approx(1.0).margin(1e-14));
  CHECK(s.active_set == std::vector<int>{0});
  CHECK(verify_kkt(qp, s).worst() <= 1e-12);
  const oracle::ProjectionResult o = oracle::brute_force_projection(qp);
  REQUIRE(o.feasible);
  CHECK(o.u[0] == Approx(1.0).margin(1e-12));
  CHECK(o.u[1] == Approx(1.0).margin(1e-12));
}

TEST_CASE("problem validation") {
  QpProblem qp = boxed({0.0, 0.0});
  qp.lb[1] = 3.0;
  CHECK_THROWS_AS(solve_qp(qp), InvalidInput);
  qp = boxed({0.0, 0.0});
  qp.rows.push_back(row({1.0}, 0.0));
  CHECK_THROWS_AS(solve_qp(qp), InvalidInput);
  qp = boxed({0.0, std::nan("")});
  CHECK_THROWS_AS(solve_qp(qp), InvalidInput);
}

TEST_CASE("infeasible problems are reported") {
  SECTION("row outside the box") {
    QpProblem qp = boxed({0.0});
    qp.rows.push_back(row({1.0}, 4.0));
    CHECK(solve_qp(qp).status == QpStatus::infeasible);
  }
  SECTION("contradicting rows") {
    QpProblem qp = boxed({0.0, 0.0});
    qp.rows.push_back(row({1.0, 1.0}, 1.0));
    qp.rows.push_back(row({-1.0, -1.0}, 0.5));
    CHECK(solve_qp(qp).status == QpStatus::infeasible);
  }
}

TEST_CASE("degenerate rows") {
  QpProblem qp = boxed({0.0, 0.0});
  qp.rows.push_back(row({1.0, 1.0}, 2.0));
  qp.rows.push_back(row({2.0, 2.0}, 4.0));
  qp.rows.push_back(row({0.0, 0.0}, -1.0));
  const QpSolution s = solve_qp(qp);
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.u_star[0] == Approx(1.0).margin(1e-12));
  CHECK(s.u_star[1] == Approx(1.0).margin(1e-12));
  CHECK(verify_kkt(qp, s).worst() <= 1e-10);
}

TEST_CASE("matches brute-force enumeration on random problems") {
  std::mt19937_64 rng(0xC0FFEE);
  std::uniform_int_distribution<int> dn(1, 4), dm(0, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dn(rng);
    const QpProblem qp = oracle::random_feasible_qp(rng, n, dm(rng));
    const QpSolution s = solve_qp(qp);
    REQUIRE(s.status == QpStatus::optimal);
    const oracle::ProjectionResult o = oracle::brute_force_projection(qp);
    REQUIRE(o.feasible);
    double err = 0.0;
    for (int k = 0; k < n; ++k) err = std::max(err, std::abs(s.u_star[k] - o.u[k]));
    CHECK(err <= 1e-7);
    CHECK(verify_kkt(qp, s).worst() <= 1e-8);
    for (int k = 0; k < n; ++k) {
      CHECK(s.u_star[k] >= qp.lb[k]);
      CHECK(s.u_star[k] <= qp.ub[k]);
    }
  }
}

TEST_CASE("removing a row never moves the solution further from u_nom") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    QpProblem qp = oracle::random_feasible_qp(rng, 4, 8);
    const double full = dist(qp, solve_qp(qp).u_star);
    for (std::size_t drop = 0; drop < qp.rows.size(); ++drop) {
      QpProblem relaxed = qp;
      relaxed.rows.erase(relaxed.rows.begin() + static_cast<long>(drop));
      const QpSolution s = solve_qp(relaxed);
      REQUIRE(s.status == QpStatus::optimal);
      CHECK(dist(relaxed, s.u_star) <= full + 1e-12);
    }
  }
}

TEST_CASE("identical inputs give bit-identical outputs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const QpProblem qp = oracle::random_feasible_qp(rng, 4, 12);
    const QpSolution a = solve_qp(qp);
    const QpSolution b = solve_qp(qp);
    CHECK(a.u_star == b.u_star);
    CHECK(a.active_set == b.active_set);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("warm start reaches the same optimum") {
  std::mt19937_64 rng(11);
  QpSolver warm;
  for (int trial = 0; trial < 300; ++trial) {
    const QpProblem qp = oracle::random_feasible_qp(rng, 4, 10);
    const QpSolution w = warm.solve(qp);
    const QpSolution c = solve_qp(qp, QpConfig{.warm_start = false});
    REQUIRE(w.status == QpStatus::optimal);
    for (int k = 0; k < 4; ++k) CHECK(w.u_star[k] == Approx(c.u_star[k]).margin(1e-9));
    // re-solving the same problem from its own active set
    const QpSolution again = warm.solve(qp);
    for (int k = 0; k < 4; ++k) CHECK(again.u_star[k] == Approx(c.u_star[k]).margin(1e-9));
  }
}

TEST_CASE("status names") {
  CHECK(to_string(QpStatus::optimal) == "optimal");
  CHECK(to_string(QpStatus::infeasible) == "infeasible");
}
