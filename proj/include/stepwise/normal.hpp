#pragma once

// Standard normal distribution helpers.

namespace stepwise::normal {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double x);
/// P(Z <= x).
double cdf(double x);
/// P(Z > x), accurate in the upper tail.
double sf(double x);
/// Inverse of cdf for p in (0,1); 0 and 1 map to -inf / +inf.
double quantile(double p);
/// Inverse of sf: returns x with P(Z > x) = q.
double upper_quantile(double q);

}  // namespace stepwise::normal
