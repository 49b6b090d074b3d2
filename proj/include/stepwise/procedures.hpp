#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "stepwise/constants.hpp"

namespace stepwise {

enum class Verdict { Accept, Reject };

/// One comparison made by a stepwise rule.
struct TraceStep {
  int step;                ///< 1-based step number
  std::size_t hypothesis;  ///< 0-based index of the hypothesis examined
  double statistic;
  double threshold;
  bool passed;             ///< the comparison triggered rejection
};

struct Decision {
  std::vector<Verdict> verdicts;
  std::vector<TraceStep> trace;

  std::vector<std::size_t> rejected() const;
  std::size_t rejected_count() const;
  bool is_rejected(std::size_t i) const { return verdicts[i] == Verdict::Reject; }
};

/// Sorts descending (ties: lower index first) and rejects the longest prefix
/// with X_{r_i} >= f_{k-i+1}.
Decision stepdown_decide(std::span<const double> x, const ConstantLadder& ladder);

/// Finds the smallest j with X_(j) > d_j in ascending order (ties: lower index
/// counts as smaller) and rejects the k - j + 1 largest.
Decision stepup_decide(std::span<const double> x, const ConstantLadder& ladder);

/// Holm's sequentially rejective rule on p-values with thresholds alpha/(k-i+1).
Decision holm_bonferroni(std::span<const double> p_values, double alpha);

/// Regions of the two-hypothesis rules: D01 rejects H2 only, D10 rejects H1 only.
enum class PairRegion { D00, D01, D10, D11 };
enum class PairVariant { StepdownOpt, StepupOpt };

std::string_view pair_region_name(PairRegion region);

PairRegion pair_classify(double x1, double x2, const PairConstants& constants,
                         PairVariant variant);

using DecisionRule = std::function<Decision(std::span<const double>)>;

struct MonotoneViolation {
  std::vector<double> y;
  std::vector<std::size_t> rejected_x;
  std::vector<std::size_t> rejected_y;
};

struct MonotoneReport {
  std::size_t trials = 0;
  std::vector<MonotoneViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Perturbs x (rejected coordinates up, accepted coordinates strictly down)
/// and records every trial where the rejected set changes.
MonotoneReport check_monotone(const DecisionRule& decide, std::span<const double> x,
                              std::size_t trials, std::uint64_t seed);

namespace detail {

/// Number of stepdown rejections for threshold ladder values (f_1..f_k);
/// order receives the descending processing order.
std::size_t stepdown_count(std::span<const double> x, std::span<const double> values,
                           std::vector<std::size_t>& order);

/// Number of stepup rejections; order receives the ascending order. The
/// ladder is not checked for monotonicity.
std::size_t stepup_count(std::span<const double> x, std::span<const double> values,
                         std::vector<std::size_t>& order);

/// stepup_decide without the ladder validation, for negative controls.
Decision stepup_decide_unchecked(std::span<const double> x, std::span<const double> values);

}  // namespace detail

}  // namespace stepwise
