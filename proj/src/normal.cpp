#include "stepwise/normal.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

namespace stepwise::normal {

double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  // erfc_inv keeps relative accuracy in whichever tail p sits.
  if (p < 0.5) return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double upper_quantile(double q) {
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  if (q >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * q);
}

}  // namespace stepwise::normal
