#include "stepwise/orderstat.hpp"

#include <algorithm>
#include <cmath>

#include "stepwise/error.hpp"
#include "stepwise/quadrature.hpp"

namespace stepwise {

ThresholdLadder::ThresholdLadder(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("threshold ladder must not be empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::isnan(values_[i])) throw InvalidArgument("threshold ladder contains NaN");
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw InvalidArgument("threshold ladder must be nondecreasing");
    }
  }
}

namespace detail {
namespace {

double binomial_coefficient(int n, int m) {
  if (m < 0 || m > n) return 0.0;
  if (n <= 64) {
    double c = 1.0;
    m = std::min(m, n - m);
    for (int i = 1; i <= m; ++i) c = c * (n - m + i) / i;
    return c;
  }
  // Beyond j = 64 the exact product overflows intermediate terms.
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
}

}  // namespace

double uniform_ladder_probability(std::span<const double> u) {
  const int j = static_cast<int>(u.size());
  // dp[n]: probability that exactly n of the j draws fall at or below the
  // current level and every prefix constraint so far holds.
  std::vector<double> dp(j + 1, 0.0), next(j + 1, 0.0);
  std::vector<double> q_pow(j + 1), r_pow(j + 1);
  std::vector<std::vector<double>> choose(j + 1, std::vector<double>(j + 1, 0.0));
  for (int r = 0; r <= j; ++r) {
    for (int m = 0; m <= r; ++m) choose[r][m] = binomial_coefficient(r, m);
  }
  dp[0] = 1.0;
  double lower = 0.0;
  for (int c = 0; c < j; ++c) {
    const double upper = std::clamp(u[c], lower, 1.0);
    const double remaining = 1.0 - lower;
    // Conditional probability that an unplaced draw lands in (lower, upper].
    const double q = remaining > 0.0 ? std::clamp((upper - lower) / remaining, 0.0, 1.0) : 1.0;
    q_pow[0] = r_pow[0] = 1.0;
    for (int m = 1; m <= j; ++m) {
      q_pow[m] = q_pow[m - 1] * q;
      r_pow[m] = r_pow[m - 1] * (1.0 - q);
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (int n = 0; n <= j; ++n) {
      if (dp[n] == 0.0) continue;
      const int r = j - n;
      for (int m = 0; m <= r; ++m) {
        next[n + m] += dp[n] * choose[r][m] * q_pow[m] * r_pow[r - m];
      }
    }
    // At least c+1 draws must sit at or below level c.
    for (int n = 0; n <= c; ++n) next[n] = 0.0;
    dp.swap(next);
    lower = upper;
  }
  return std::clamp(dp[j], 0.0, 1.0);
}

namespace {

void check_args(const ModelSpec& model, int j, std::size_t ladder_size) {
  if (j < 1 || j > model.k()) throw InvalidArgument("order statistic count j out of range [1, k]");
  if (ladder_size != static_cast<std::size_t>(j)) {
    throw InvalidArgument("ladder length must equal j");
  }
}

}  // namespace

double joint_orderstat_cdf_at(const ModelSpec& model, int j, std::span<const double> ladder,
                              double shift) {
  check_args(model, j, ladder.size());
  require_shift_support(model, shift);
  std::vector<double> u(j);
  if (!model.has_common_factor()) {
    for (int i = 0; i < j; ++i) u[i] = marginal_cdf(model, shift, ladder[i]);
    return uniform_ladder_probability(u);
  }
  return quadrature::expect_normal([&](double z) {
    for (int i = 0; i < j; ++i) u[i] = conditional_cdf(model, shift, ladder[i], z);
    return uniform_ladder_probability(u);
  });
}

}  // namespace detail

double joint_orderstat_cdf(const ModelSpec& model, int j, const ThresholdLadder& ladder) {
  return detail::joint_orderstat_cdf_at(model, j, ladder.values(), 0.0);
}

double joint_orderstat_survival(const ModelSpec& model, int j, const ThresholdLadder& ladder,
                                double shift) {
  detail::check_args(model, j, ladder.size());
  detail::require_shift_support(model, shift);
  // Reflection: {X_(i) > g_i for all i} is the event that the negated sample's
  // ascending order statistics sit below the reversed, negated ladder, so the
  // DP levels are the exceedance probabilities of g_j, g_{j-1}, ..., g_1.
  std::vector<double> u(j);
  if (!model.has_common_factor()) {
    for (int m = 0; m < j; ++m) u[m] = marginal_sf(model, shift, ladder[j - 1 - m]);
    return detail::uniform_ladder_probability(u);
  }
  return quadrature::expect_normal([&](double z) {
    for (int m = 0; m < j; ++m) u[m] = detail::conditional_sf(model, shift, ladder[j - 1 - m], z);
    return detail::uniform_ladder_probability(u);
  });
}

}  // namespace stepwise
