#include "stepwise/power.hpp"

#include <algorithm>
#include <vector>

#include "stepwise/error.hpp"
#include "stepwise/orderstat.hpp"

namespace stepwise {

std::string_view criterion_kind_name(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::StepdownBeta:
      return "stepdown-beta";
    case CriterionKind::StepupBeta:
      return "stepup-beta";
    case CriterionKind::PairA1:
      return "pair-a1";
    case CriterionKind::PairA2:
      return "pair-a2";
  }
  return "?";
}

namespace {

void check_kj(int k, int j) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (j < 1 || j > k) throw InvalidArgument("j out of range [1, k]");
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
}

}  // namespace

ThetaVector lfc_theta(int k, int j, double epsilon) {
  check_kj(k, j);
  check_epsilon(epsilon);
  std::vector<double> theta(k, -kInf);
  std::fill_n(theta.begin(), j, epsilon);
  return ThetaVector(std::move(theta));
}

ThetaVector null_lfc_theta(int k, int j) {
  check_kj(k, j);
  std::vector<double> theta(k, 0.0);
  std::fill_n(theta.begin(), j - 1, kInf);
  return ThetaVector(std::move(theta));
}

double beta_stepdown(const ConstantLadder& ladder, int k, int j, double epsilon) {
  check_kj(k, j);
  check_epsilon(epsilon);
  if (ladder.kind != LadderKind::Stepdown || ladder.k() < k) {
    throw InvalidArgument("beta_stepdown needs a stepdown ladder with at least k values");
  }
  // Ascending staircase g_i = f_{k-j+i}: the smallest of the j statistics
  // must clear f_{k-j+1}, the largest f_k.
  std::vector<double> g(ladder.values.begin() + (k - j), ladder.values.begin() + k);
  return joint_orderstat_survival(ladder.model.with_k(k), j, ThresholdLadder(std::move(g)),
                                  epsilon);
}

CriterionResult beta_stepdown(const ModelSpec& model, double alpha, int k, int j,
                              double epsilon) {
  check_kj(k, j);
  const ConstantLadder ladder = solve_stepdown(model.with_k(k), alpha);
  return {beta_stepdown(ladder, k, j, epsilon), CriterionKind::StepdownBeta, k, j, alpha,
          {epsilon, epsilon}, model.with_k(k)};
}

double beta_stepup(const ConstantLadder& ladder, int k, int j, double epsilon) {
  check_kj(k, j);
  check_epsilon(epsilon);
  if (ladder.kind != LadderKind::Stepup || ladder.k() < k) {
    throw InvalidArgument("beta_stepup needs a stepup ladder with at least k values");
  }
  const double d = ladder.values[k - j];
  const std::vector<double> theta(j, epsilon);
  const std::vector<double> t(j, d);
  return upper_orthant(ladder.model.with_k(k), theta, t);
}

CriterionResult beta_stepup(const ModelSpec& model, double alpha, int k, int j, double epsilon) {
  check_kj(k, j);
  check_epsilon(epsilon);
  detail::require_shift_support(model, epsilon);
  const ConstantLadder ladder = solve_stepup(model.with_k(k), alpha);
  return {beta_stepup(ladder, k, j, epsilon), CriterionKind::StepupBeta, k, j, alpha,
          {epsilon, epsilon}, model.with_k(k)};
}

PairCriteria pair_criteria(const PairConstants& c, PairVariant variant) {
  const ModelSpec& m = c.model;
  const std::array<double, 2> theta = c.epsilon;
  auto both_above = [&](double t1, double t2) {
    const std::array<double, 2> t{t1, t2};
    return upper_orthant(m, theta, t);
  };
  PairCriteria out{};
  if (variant == PairVariant::StepdownOpt) {
    out.crit_a1 = marginal_sf(m, theta[0], c.a[0]);
    // P({X1 > a1, X2 > b2} u {X1 > b1, X2 > a2}); the intersection is
    // {X1 > a1, X2 > a2} because b_i < a_i.
    out.crit_a2 = both_above(c.a[0], c.b[1]) + both_above(c.b[0], c.a[1]) -
                  both_above(c.a[0], c.a[1]);
  } else {
    out.crit_a1 = marginal_sf(m, theta[0], c.a_tilde[0]);
    out.crit_a2 = both_above(c.b[0], c.b[1]);
  }
  return out;
}

}  // namespace stepwise
