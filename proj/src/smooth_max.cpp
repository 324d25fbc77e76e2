#include "icbf/smooth_max.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

// ln(1 + e^z) and its derivative, stable for any z.
double log1p_exp(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double smooth_max(double c, double x, double b1, double b2) {
  return c + log1p_exp((x - b1) * b2) / b2;
}

SmoothValue bounded_max(double floor, double x, const SmoothMaxParams& p) {
  const double knee = p.side == ApproxSide::over ? floor + p.b1 : floor;
  const double base = p.side == ApproxSide::over ? floor : floor - p.b1;
  const double z = (x - knee) * p.b2;
  return {base + log1p_exp(z) / p.b2, logistic(z)};
}

void validate_side_contract(const SmoothMaxParams& p, double lo, double hi, int samples) {
  if (!(p.b2 > 0.0)) throw InvalidInput("smooth max: b2 must be > 0");
  if (p.b1 < 0.0) throw InvalidInput("smooth max: b1 must be >= 0");
  constexpr double kTailBound = 0.05;
  const double knee = p.side == ApproxSide::over ? p.b1 : 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = lo + (hi - lo) * k / (samples - 1);
    const double approx = bounded_max(0.0, x, p).value;
    const double exact = std::max(0.0, x);
    const bool side_ok = p.side == ApproxSide::over ? approx >= exact - 1e-12 : approx <= exact + 1e-12;
    const bool tail_ok = std::abs(x - knee) < 5.0 / p.b2 || std::abs(approx - exact) <= kTailBound;
    if (!side_ok || !tail_ok) {
      std::ostringstream msg;
      msg << "smooth max (b1=" << p.b1 << ", b2=" << p.b2 << ", side="
          << (p.side == ApproxSide::over ? "over" : "under") << ") violates its "
          << (side_ok ? "tail accuracy" : "side") << " contract at x-floor=" << x << ": approx=" << approx
          << " exact=" << exact;
      throw InvalidInput(msg.str());
    }
  }
}

void SmoothMaxSet::validate() const {
  if (closing_speed.side != ApproxSide::over)
    throw InvalidInput("closing-speed smooth max must over-approximate");
  if (decel.side != ApproxSide::over)
    throw InvalidInput("deceleration smooth max must over-approximate max{u_min, -lambda v}");
  if (braking_floor.side != ApproxSide::under)
    throw InvalidInput("braking-floor smooth max must under-approximate");
  if (!(epsilon_mps2 > 0.0)) throw InvalidInput("epsilon must be > 0");
  if (!(epsilon_mps2 - braking_floor.b1 > 0.0))
    throw InvalidInput("epsilon - braking_floor.b1 must stay positive (denominator floor)");
  validate_side_contract(closing_speed);
  validate_side_contract(decel);
  validate_side_contract(braking_floor);
}

}  // namespace icbf
