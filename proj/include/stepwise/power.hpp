#pragma once

#include <array>
#include <string_view>

#include "stepwise/constants.hpp"
#include "stepwise/procedures.hpp"

namespace stepwise {

enum class CriterionKind { StepdownBeta, StepupBeta, PairA1, PairA2 };

std::string_view criterion_kind_name(CriterionKind kind);

/// Value of a maximin criterion together with what it was computed for.
struct CriterionResult {
  double value;
  CriterionKind kind;
  int k;
  int j;
  double alpha;
  std::array<double, 2> epsilon;  ///< second entry unused for the k-hypothesis criteria
  ModelSpec model;
};

/// j coordinates at epsilon, the remaining k - j at -inf.
ThetaVector lfc_theta(int k, int j, double epsilon);

/// j - 1 coordinates at +inf, the remaining k - j + 1 at 0.
ThetaVector null_lfc_theta(int k, int j);

/// Minimum over A_j(eps) of P(stepdown rejects >= j):
/// P_{eps,...,eps}(X_{j:i} > f_{k-j+i}, i = 1..j).
CriterionResult beta_stepdown(const ModelSpec& model, double alpha, int k, int j,
                              double epsilon);
/// Same with a precomputed stepdown ladder of size >= k (only f_{k-j+1}..f_k are used).
double beta_stepdown(const ConstantLadder& ladder, int k, int j, double epsilon);

/// Minimum over A_j(eps) of P(stepup rejects >= j):
/// P_{eps,...,eps}(min(X_1..X_j) > d_{k-j+1}).
CriterionResult beta_stepup(const ModelSpec& model, double alpha, int k, int j, double epsilon);
double beta_stepup(const ConstantLadder& ladder, int k, int j, double epsilon);

struct PairCriteria {
  double crit_a1;  ///< min over A_1(eps) of P(reject at least one)
  double crit_a2;  ///< min over A_2(eps) of P(reject both)
};

/// Analytic criterion values of the k = 2 optimal rules.
PairCriteria pair_criteria(const PairConstants& constants, PairVariant variant);

}  // namespace stepwise
