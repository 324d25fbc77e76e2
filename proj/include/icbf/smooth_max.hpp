#pragma once

namespace icbf {

/// Which side of the exact max{c, x} an approximation must stay on.
enum class ApproxSide { over, under };

struct SmoothMaxParams {
  double b1 = 0.0;   // shift, >= 0
  double b2 = 20.0;  // sharpness, > 0
  ApproxSide side = ApproxSide::over;
};

/// c + ln(1 + exp((x - b1) b2)) / b2, evaluated without overflow.
double smooth_max(double c, double x, double b1, double b2);

struct SmoothValue {
  double value = 0.0;
  double slope = 0.0;  // d value / d x
};

/// Smooth stand-in for max{floor, x} on the declared side:
///   over:  floor + softplus(x - floor - b1)      (>= max iff b1 == 0)
///   under: floor - b1 + softplus(x - floor)      (<= max iff b1 >= ln2/b2)
/// softplus(y) = ln(1 + exp(b2 y)) / b2.
SmoothValue bounded_max(double floor, double x, const SmoothMaxParams& p);

/// Checks the side contract by dense sampling of x - floor over [lo, hi],
/// plus |approx - exact| <= 0.05 wherever x is at least 5/b2 from the knee.
/// Throws InvalidInput naming the first violating sample.
void validate_side_contract(const SmoothMaxParams& p, double lo = -30.0, double hi = 30.0,
                            int samples = 60001);

/// The three smooth max instances used by the collision barrier.
struct SmoothMaxSet {
  SmoothMaxParams closing_speed{0.0, 20.0, ApproxSide::over};   // max{0, -v_ij}
  SmoothMaxParams decel{0.0, 20.0, ApproxSide::over};           // max{u_min, -lambda v}
  SmoothMaxParams braking_floor{0.034657359027997264, 20.0, ApproxSide::under};  // max{eps, a_hat}
  double epsilon_mps2 = 0.1;

  /// Validates every instance; fails fast on the first violated contract.
  void validate() const;
};

}  // namespace icbf
