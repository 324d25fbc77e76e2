#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "icbf/errors.hpp"
#include "icbf/vehicle_dynamics.hpp"

using Catch::Approx;
using namespace icbf;

namespace {

AgentParams agent1() {
  AgentParams p;
  p.mass_kg = 1200.0;
  p.c0_N = 0.01 * 1200.0 * 9.81;
  p.c1_Ns_per_m = -0.433;
  p.c2_Ns2_per_m2 = 0.422;
  return p;
}

AgentParams frictionless() {
  AgentParams p;
  p.c0_N = p.c1_Ns_per_m = p.c2_Ns2_per_m2 = 0.0;
  return p;
}

// Closed-form solution of m dv/dt = -(c2 v^2 + c1 v + c0 - m u) for v > 0
// when the quadratic has no real root (braking or mild acceleration).
AgentState exact_quadratic_drag(const AgentParams& p, AgentState x0, double u, double t) {
  const double k = p.c0_N - p.mass_kg * u;
  const double beta = p.c1_Ns_per_m / (2.0 * p.c2_Ns2_per_m2);
  const double gamma = std::sqrt(k / p.c2_Ns2_per_m2 - beta * beta);
  const double kappa = p.c2_Ns2_per_m2 * gamma / p.mass_kg;
  const double th0 = std::atan((x0.v_mps + beta) / gamma);
  AgentState x;
  x.v_mps = -beta + gamma * std::tan(th0 - kappa * t);
  x.s_m = x0.s_m - beta * t + (gamma / kappa) * std::log(std::cos(th0 - kappa * t) / std::cos(th0));
  return x;
}

}  // namespace

TEST_CASE("resistance force examples") {
  CHECK(resistance_force(0.0, agent1()) == 0.0);
  CHECK(resistance_force(15.0, agent1()) == Approx(117.72 - 6.495 + 94.95).epsilon(1e-12));
  AgentParams lin = frictionless();
  lin.c1_Ns_per_m = 1.0;
  CHECK(resistance_force(1.0, lin) == Approx(1.0));
}

TEST_CASE("resistance c0 term is odd") {
  AgentParams p = frictionless();
  p.c0_N = 50.0;
  for (double v : {0.1, 1.0, 7.5, 30.0}) CHECK(resistance_force(-v, p) == -resistance_force(v, p));
}

TEST_CASE("state derivative examples") {
  const StateDerivative eq = state_derivative({0.0, 3.0}, 0.0, frictionless());
  CHECK(eq.dv_dt == 0.0);
  CHECK(eq.ds_dt == 0.0);

  const StateDerivative a1 = state_derivative({15.0, 0.0}, 0.0, agent1());
  CHECK(a1.dv_dt == Approx(-206.175 / 1200.0).epsilon(1e-12));
  CHECK(a1.ds_dt == 15.0);

  AgentParams half = frictionless();
  half.mass_kg = 1000.0;
  half.c1_Ns_per_m = 100.0;  // F_r(5) = 500 N = m * 0.5
  const StateDerivative c = state_derivative({5.0, 0.0}, 2.0, half);
  CHECK(c.dv_dt == Approx(1.5));
  CHECK(c.ds_dt == 5.0);
}

TEST_CASE("state derivative is affine in u with unit gain") {
  const AgentParams p = agent1();
  for (double v : {0.0, 0.3, 6.2, 15.0}) {
    for (double u : {-3.0, -0.5, 0.0, 2.0}) {
      const StateDerivative a = state_derivative({v, 1.0}, u, p);
      const StateDerivative b = state_derivative({v, 1.0}, u + 1.0, p);
      CHECK(b.dv_dt - a.dv_dt == Approx(1.0).margin(1e-14));
      CHECK(b.ds_dt == a.ds_dt);
    }
  }
}

TEST_CASE("integrate_step examples") {
  const std::vector<AgentParams> p1{agent1()};
  SECTION("resistance-cancelling input keeps the speed") {
    const StackedState x{{12.0, 4.0}};
    const double u = resistance_force(12.0, p1[0]) / p1[0].mass_kg;
    const StackedState y = integrate_step(x, std::vector<double>{u}, p1, 0.02);
    CHECK(std::abs(y[0].v_mps - 12.0) <= 1e-12);
    CHECK(y[0].s_m == Approx(4.0 + 12.0 * 0.02).epsilon(1e-13));
  }
  SECTION("constant deceleration without drag") {
    const std::vector<AgentParams> p{frictionless()};
    const StackedState y = integrate_step({{10.0, 0.0}}, std::vector<double>{-1.0}, p, 0.02, 1);
    CHECK(y[0].v_mps == Approx(9.98).epsilon(1e-14));
    CHECK(y[0].s_m == Approx(0.1998).epsilon(1e-14));
  }
  SECTION("one step of 0.02 s vs two of 0.01 s") {
    const StackedState x{{14.0, 3.0}};
    const std::vector<double> u{-2.5};
    const StackedState one = integrate_step(x, u, p1, 0.02, 1);
    const StackedState two = integrate_step(integrate_step(x, u, p1, 0.01, 1), u, p1, 0.01, 1);
    CHECK(std::abs(one[0].v_mps - two[0].v_mps) <= 1e-8);
    CHECK(std::abs(one[0].s_m - two[0].s_m) <= 1e-8);
  }
}

TEST_CASE("RK4 global error shrinks sixteenfold when the step halves") {
  const AgentParams p = agent1();
  const std::vector<AgentParams> ps{p};
  const AgentState x0{15.0, 0.0};
  const double u = -2.0;
  const double T = 2.0;
  const AgentState ref = exact_quadratic_drag(p, x0, u, T);
  auto err = [&](int substeps) {
    const StackedState y = integrate_step({x0}, std::vector<double>{u}, ps, T, substeps);
    return std::abs(y[0].v_mps - ref.v_mps) + std::abs(y[0].s_m - ref.s_m);
  };
  const double e1 = err(2);
  const double e2 = err(4);
  REQUIRE(e2 > 0.0);
  CHECK(e1 / e2 >= 16.0 * 0.8);
  CHECK(e1 / e2 <= 16.0 * 1.2);
}

TEST_CASE("velocity dust is snapped, real undershoot is kept") {
  const std::vector<AgentParams> p{frictionless()};
  const StackedState dust = integrate_step({{0.0, 0.0}}, std::vector<double>{-5e-8}, p, 0.01, 1);
  CHECK(dust[0].v_mps == 0.0);
  const StackedState real = integrate_step({{0.0, 0.0}}, std::vector<double>{-1.0}, p, 0.02, 1);
  CHECK(real[0].v_mps == Approx(-0.02));
}

TEST_CASE("non-finite input diverges loudly") {
  const std::vector<AgentParams> p{agent1()};
  CHECK_THROWS_AS(integrate_step({{5.0, 0.0}}, std::vector<double>{std::nan("")}, p, 0.02), IntegrationDiverged);
}

TEST_CASE("integrate_step preconditions") {
  const std::vector<AgentParams> p{agent1()};
  CHECK_THROWS_AS(integrate_step({{5.0, 0.0}}, std::vector<double>{0.0}, p, 0.0), InvalidInput);
  CHECK_THROWS_AS(integrate_step({{5.0, 0.0}}, std::vector<double>{0.0}, p, 0.02, 0), InvalidInput);
  CHECK_THROWS_AS(integrate_step({{5.0, 0.0}}, std::vector<double>{0.0, 1.0}, p, 0.02), InvalidInput);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate(agent1(), 5.0));
  AgentParams p = agent1();
  p.u_min_mps2 = 0.5;
  CHECK_THROWS_AS(validate(p, 5.0), InvalidInput);
  p = agent1();
  p.mass_kg = -1.0;
  CHECK_THROWS_AS(validate(p, 5.0), InvalidInput);
  p = agent1();
  p.v_ref_mps = 20.0;
  CHECK_THROWS_AS(validate(p, 5.0), InvalidInput);
  // u_max too small to honour the lower velocity barrier just above v = 0
  p = agent1();
  p.c0_N = 0.01 * p.mass_kg * 9.81;
  p.u_max_mps2 = 0.05;
  CHECK(max_lower_barrier_accel(p, 5.0) > 0.05);
  CHECK_THROWS_AS(validate(p, 5.0), InvalidInput);
}
