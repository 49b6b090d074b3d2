#pragma once

#include <array>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include "stepwise/models.hpp"

namespace stepwise {

enum class LadderKind { Stepdown, Stepup };

std::string_view ladder_kind_name(LadderKind kind);
LadderKind parse_ladder_kind(std::string_view name);

/// Bisection stops once the bracket is narrower than this (statistic scale).
inline constexpr double kRootWidth = 1e-12;
/// Largest accepted |probability residual| of a solved constant.
inline constexpr double kResidualTolerance = 1e-9;

/// Critical constants indexed by the number of hypotheses still in play:
/// values[j-1] is f_j (stepdown) or d_j (stepup). Both kinds are
/// nondecreasing in j and share values[0].
struct ConstantLadder {
  LadderKind kind;
  double alpha;
  ModelSpec model;
  std::vector<double> values;
  /// Defining-equation residual of each value (probability scale).
  std::vector<double> residuals;

  int k() const noexcept { return static_cast<int>(values.size()); }
  /// c_{k,i} in the sequential notation: the threshold for step i of k.
  double step_threshold(int i) const { return values[values.size() - i]; }
};

/// f_j solves P_0(max(X_1..X_j) > f_j) = alpha, j = 1..k.
ConstantLadder solve_stepdown(const ModelSpec& model, double alpha);

/// d_j solves P_0(X_{j:1} <= d_1, ..., X_{j:j} <= d_j) = 1 - alpha with
/// d_1..d_{j-1} already fixed. Throws NonMonotoneLadder if some d_j < d_{j-1}.
ConstantLadder solve_stepup(const ModelSpec& model, double alpha);

ConstantLadder solve_ladder(LadderKind kind, const ModelSpec& model, double alpha);

/// Residual of values[j-1] in its defining equation, recomputed from scratch.
double ladder_residual(const ConstantLadder& ladder, int j);

/// Constants of the two-hypothesis optimal rules.
struct PairConstants {
  double alpha;
  std::array<double, 2> epsilon;
  std::array<double, 2> a;        ///< stepdown-optimal outer thresholds
  std::array<double, 2> b;        ///< marginal 1 - alpha thresholds
  std::array<double, 2> a_tilde;  ///< stepup-optimal outer thresholds
  ModelSpec model;
  /// Residuals of: joint level for a, marginal level for b1/b2, joint level for a_tilde.
  std::array<double, 4> residuals;
};

struct PairStepdownResult {
  std::array<double, 2> a;
  std::array<double, 2> b;
  double level_residual;
  std::array<double, 2> b_residuals;
};

/// Solves P_{0,0}(X_1 > a_1 or X_2 > a_2) = alpha together with
/// P_{eps1}(X_1 > a_1) = P_{eps2}(X_2 > a_2), and b_i as the marginal 1 - alpha point.
PairStepdownResult solve_pair_stepdown(const ModelSpec& model, double alpha,
                                       std::array<double, 2> epsilon);

struct PairStepupResult {
  std::array<double, 2> a_tilde;
  double level_residual;
};

/// Solves P_{0,0}(complement of accept-none region) = alpha where the
/// accept-none region is {X_1 <= a~_1, X_2 <= a~_2} minus {X_1 > b_1, X_2 > b_2},
/// together with P_{eps1}(X_1 >= a~_1) = P_{eps2}(X_2 >= a~_2).
PairStepupResult solve_pair_stepup(const ModelSpec& model, double alpha,
                                   std::array<double, 2> epsilon, std::array<double, 2> b);

/// Runs both pair solvers and checks b_i < a_i < a~_i.
PairConstants solve_pair_constants(const ModelSpec& model, double alpha,
                                   std::array<double, 2> epsilon);

/// Probability that the k = 2 stepup-optimal rule accepts both hypotheses at theta = (0,0).
double pair_accept_none_probability(const ModelSpec& model, std::array<double, 2> a_tilde,
                                    std::array<double, 2> b);

/// Root of an increasing function g(x) = target. Brackets by geometric
/// expansion around start, then bisects until the bracket is below width.
double solve_increasing(const std::function<double(double)>& g, double target, double start,
                        double width = kRootWidth);

/// Memoises solved ladders keyed by (kind, family, rho, k, alpha). Thread-safe.
class ConstantCache {
 public:
  const ConstantLadder& get(LadderKind kind, const ModelSpec& model, double alpha);
  std::size_t size() const;

 private:
  using Key = std::tuple<int, int, double, int, double>;
  mutable std::mutex mutex_;
  std::map<Key, ConstantLadder> entries_;
};

}  // namespace stepwise
