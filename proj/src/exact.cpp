#include "curvflow/exact.hpp"

#include <cmath>

#include "curvflow/errors.hpp"
#include "curvflow/numeric.hpp"

namespace curvflow::exact {

namespace {
// Treat |sigma - 1| below this as the exponential branch; the general-branch
// formula degenerates as 1/(1-sigma) there.
constexpr double kSigmaOneTol = 1e-12;
}  // namespace

double ball_radius(double r0, double t, double eta, double sigma) {
  if (t == 0.0) return r0;  // bitwise, not through the pow round-trip
  if (std::abs(sigma - 1.0) < kSigmaOneTol) return r0 * std::exp(eta * t);
  const double one_minus = 1.0 - sigma;
  const double base = pow_fast(r0, one_minus) + one_minus * eta * t;
  // Past blow-up (sigma>1) the base crosses zero; surface that as +inf
  // rather than a NaN from a fractional power of a negative number.
  if (base <= 0.0) return std::numeric_limits<double>::infinity();
  return pow_fast(base, 1.0 / one_minus);
}

double phi_schedule(double t, double eta, double sigma) {
  return ball_radius(1.0, t, eta, sigma);
}

double blow_up_time(double r0, double eta, double sigma) {
  if (!(sigma > 1.0 + kSigmaOneTol))
    throw ConfigError("blow_up_time: finite blow-up requires sigma > 1");
  if (!(eta > 0.0) || !(r0 > 0.0))
    throw ConfigError("blow_up_time: requires eta > 0 and r0 > 0");
  return pow_fast(r0, 1.0 - sigma) / ((sigma - 1.0) * eta);
}

double tau_of_t(double t, double eta, double sigma) {
  if (std::abs(sigma - 1.0) < kSigmaOneTol) return t;
  const double a = (1.0 - sigma) * eta;
  const double arg = a * t;
  if (arg <= -1.0) return std::numeric_limits<double>::infinity();
  return std::log1p(arg) / a;
}

}  // namespace curvflow::exact
