#include "stepwise/constants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stepwise/error.hpp"
#include "stepwise/orderstat.hpp"

namespace stepwise {

std::string_view ladder_kind_name(LadderKind kind) {
  return kind == LadderKind::Stepdown ? "stepdown" : "stepup";
}

LadderKind parse_ladder_kind(std::string_view name) {
  if (name == "stepdown") return LadderKind::Stepdown;
  if (name == "stepup") return LadderKind::Stepup;
  throw InvalidArgument("unknown ladder kind '" + std::string(name) + "'");
}

double solve_increasing(const std::function<double(double)>& g, double target, double start,
                        double width) {
  double lo = start;
  double hi = start;
  double step = 1.0;
  if (g(start) < target) {
    do {
      lo = hi;
      hi = start + step;
      step *= 2.0;
      if (step > 1e12) throw NumericalError("root bracket expansion failed (upper)");
    } while (g(hi) < target);
  } else {
    do {
      hi = lo;
      lo = start - step;
      step *= 2.0;
      if (step > 1e12) throw NumericalError("root bracket expansion failed (lower)");
    } while (g(lo) >= target);
  }
  // Invariant: g(lo) < target <= g(hi).
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

// Marginal 1 - alpha point, shared by f_1, d_1 and b_i so they agree bit for bit.
double marginal_level_point(const ModelSpec& model, double alpha) {
  return marginal_upper_quantile(model, 0.0, alpha);
}

double stepdown_value(const ModelSpec& model, double alpha, int j, double previous) {
  if (j == 1) return marginal_level_point(model, alpha);
  if (!model.has_common_factor()) {
    // Independence: P(max <= f) = F(f)^j, so F(f) = (1 - alpha)^(1/j).
    const double tail = -std::expm1(std::log1p(-alpha) / j);
    return marginal_upper_quantile(model, 0.0, tail);
  }
  return solve_increasing([&](double t) { return max_cdf_null(model, j, t); }, 1.0 - alpha,
                          previous);
}

double stepup_level(const ModelSpec& model, std::span<const double> fixed, double d) {
  // The candidate d may sit below earlier rungs while bracketing; the event
  // then only constrains X_{j:i} <= min(d_i, d).
  std::vector<double> ladder(fixed.begin(), fixed.end());
  for (double& v : ladder) v = std::min(v, d);
  ladder.push_back(d);
  return detail::joint_orderstat_cdf_at(model, static_cast<int>(ladder.size()), ladder, 0.0);
}

}  // namespace

ConstantLadder solve_stepdown(const ModelSpec& model, double alpha) {
  check_alpha(alpha);
  ConstantLadder out{LadderKind::Stepdown, alpha, model, {}, {}};
  double previous = marginal_level_point(model, alpha);
  for (int j = 1; j <= model.k(); ++j) {
    previous = stepdown_value(model, alpha, j, previous);
    out.values.push_back(previous);
  }
  for (int j = 1; j <= model.k(); ++j) out.residuals.push_back(ladder_residual(out, j));
  return out;
}

ConstantLadder solve_stepup(const ModelSpec& model, double alpha) {
  check_alpha(alpha);
  ConstantLadder out{LadderKind::Stepup, alpha, model, {}, {}};
  out.values.push_back(marginal_level_point(model, alpha));
  for (int j = 2; j <= model.k(); ++j) {
    const double prev = out.values.back();
    double d = solve_increasing([&](double t) { return stepup_level(model, out.values, t); },
                                1.0 - alpha, prev);
    if (d < prev) {
      if (prev - d > kResidualTolerance) {
        throw NonMonotoneLadder("stepup constant d_" + std::to_string(j) + " = " +
                                    std::to_string(d) + " falls below d_" +
                                    std::to_string(j - 1) + " = " + std::to_string(prev),
                                j);
      }
      d = prev;
    }
    out.values.push_back(d);
  }
  for (int j = 1; j <= model.k(); ++j) out.residuals.push_back(ladder_residual(out, j));
  return out;
}

ConstantLadder solve_ladder(LadderKind kind, const ModelSpec& model, double alpha) {
  return kind == LadderKind::Stepdown ? solve_stepdown(model, alpha) : solve_stepup(model, alpha);
}

double ladder_residual(const ConstantLadder& ladder, int j) {
  if (j < 1 || j > ladder.k()) throw InvalidArgument("ladder_residual: j out of range");
  const double target = 1.0 - ladder.alpha;
  if (ladder.kind == LadderKind::Stepdown) {
    return max_cdf_null(ladder.model, j, ladder.values[j - 1]) - target;
  }
  std::span<const double> prefix(ladder.values.data(), j);
  return detail::joint_orderstat_cdf_at(ladder.model, j, prefix, 0.0) - target;
}

// --- pair constants ---------------------------------------------------------

namespace {

void check_epsilon(const ModelSpec& model, std::array<double, 2> epsilon) {
  if (model.k() != 2) throw InvalidArgument("pair constants need a model with k = 2");
  if (!(epsilon[0] > 0.0 && epsilon[1] > 0.0) || !std::isfinite(epsilon[0]) ||
      !std::isfinite(epsilon[1])) {
    throw InvalidArgument("epsilon components must be finite and > 0");
  }
  if (!model.supports_shift() && epsilon[0] != epsilon[1]) {
    throw ModelError(model.describe() + " cannot balance unequal epsilon (no shift support)");
  }
}

constexpr std::array<double, 2> kNull{0.0, 0.0};

double joint_cdf(const ModelSpec& model, double t1, double t2) {
  const std::array<double, 2> t{t1, t2};
  return lower_orthant(model, kNull, t);
}

// P(l1 < X1 <= u1, l2 < X2 <= u2) at theta = (0,0).
double rectangle(const ModelSpec& model, double l1, double u1, double l2, double u2) {
  if (u1 <= l1 || u2 <= l2) return 0.0;
  return joint_cdf(model, u1, u2) - joint_cdf(model, l1, u2) - joint_cdf(model, u1, l2) +
         joint_cdf(model, l1, l2);
}

}  // namespace

PairStepdownResult solve_pair_stepdown(const ModelSpec& model, double alpha,
                                       std::array<double, 2> epsilon) {
  check_alpha(alpha);
  check_epsilon(model, epsilon);
  // Location families: P_eps1(X1 > a1) = P_eps2(X2 > a2) iff a1 - eps1 = a2 - eps2.
  const double offset = epsilon[1] - epsilon[0];
  const double b = marginal_level_point(model, alpha);
  const double a1 = solve_increasing(
      [&](double t) { return joint_cdf(model, t, t + offset); }, 1.0 - alpha, b);
  PairStepdownResult out;
  out.a = {a1, a1 + offset};
  out.b = {b, b};
  out.level_residual = joint_cdf(model, out.a[0], out.a[1]) - (1.0 - alpha);
  out.b_residuals = {marginal_sf(model, 0.0, b) - alpha, marginal_sf(model, 0.0, b) - alpha};
  return out;
}

double pair_accept_none_probability(const ModelSpec& model, std::array<double, 2> a_tilde,
                                    std::array<double, 2> b) {
  return joint_cdf(model, a_tilde[0], a_tilde[1]) -
         rectangle(model, b[0], a_tilde[0], b[1], a_tilde[1]);
}

PairStepupResult solve_pair_stepup(const ModelSpec& model, double alpha,
                                   std::array<double, 2> epsilon, std::array<double, 2> b) {
  check_alpha(alpha);
  check_epsilon(model, epsilon);
  const double offset = epsilon[1] - epsilon[0];
  const double a1 = solve_increasing(
      [&](double t) { return pair_accept_none_probability(model, {t, t + offset}, b); },
      1.0 - alpha, b[0]);
  PairStepupResult out;
  out.a_tilde = {a1, a1 + offset};
  out.level_residual = pair_accept_none_probability(model, out.a_tilde, b) - (1.0 - alpha);
  return out;
}

PairConstants solve_pair_constants(const ModelSpec& model, double alpha,
                                   std::array<double, 2> epsilon) {
  const PairStepdownResult down = solve_pair_stepdown(model, alpha, epsilon);
  const PairStepupResult up = solve_pair_stepup(model, alpha, epsilon, down.b);
  for (int i = 0; i < 2; ++i) {
    if (!(down.b[i] < down.a[i] && down.a[i] < up.a_tilde[i])) {
      throw NumericalError("pair constants violate b_i < a_i < a~_i");
    }
  }
  return PairConstants{alpha,
                       epsilon,
                       down.a,
                       down.b,
                       up.a_tilde,
                       model,
                       {down.level_residual, down.b_residuals[0], down.b_residuals[1],
                        up.level_residual}};
}

// --- cache ------------------------------------------------------------------

const ConstantLadder& ConstantCache::get(LadderKind kind, const ModelSpec& model, double alpha) {
  const Key key{static_cast<int>(kind), static_cast<int>(model.family()), model.rho(), model.k(),
                alpha};
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) it = entries_.emplace(key, solve_ladder(kind, model, alpha)).first;
  return it->second;
}

std::size_t ConstantCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace stepwise
