#pragma once

// Finite-grid models used as brute-force oracles for the k = 2 optimality
// results and for the slice identities of monotone regions.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace stepwise::grid {

/// Two independent coordinates on the support {1..m}.
struct GridModel {
  int m;
  std::vector<double> null_pmf;
  std::vector<double> alt_pmf;

  /// Validates pmfs (length m, sum 1 within 1e-12) and that alt dominates null.
  static GridModel make(std::vector<double> null_pmf, std::vector<double> alt_pmf);

  /// Cells split by m - 1 equally spaced cut points on [lo, hi]; the null is
  /// N(0,1), the alternative N(shift, 1).
  static GridModel discretized_normal(int m, double shift, double lo, double hi);
};

/// Per-coordinate law: null pmf, alternative pmf, or the point masses at m
/// (limit theta -> +inf) and at 1 (limit theta -> -inf, a true null).
enum class GridConfig { Null, Alt, AltTop, AltBottom };

bool is_true_null(GridConfig c);

/// Stepdown-shaped rule with 1-based integer thresholds in {1..m+1}:
/// accept-none iff X1 < a1 and X2 < a2; reject only H2 on {X1 < b1, X2 >= a2};
/// reject only H1 on {X1 >= a1, X2 < b2}; reject both on {X >= b} outside
/// accept-none. Requires b_i <= a_i.
struct ThresholdRule {
  std::array<int, 2> a;
  std::array<int, 2> b;

  bool operator==(const ThresholdRule&) const = default;
};

/// Arbitrary decision rule: labels[(x1-1) + m*(x2-1)] holds bit 0 for
/// "reject H1" and bit 1 for "reject H2".
struct GridRule {
  int m;
  std::vector<std::uint8_t> labels;

  std::uint8_t at(int x1, int x2) const { return labels[(x1 - 1) + m * (x2 - 1)]; }
};

GridRule to_grid_rule(const ThresholdRule& rule, int m);

/// Exact P(reject some true-null coordinate) under the given configuration.
double exact_fwer_grid(const GridRule& rule, const GridModel& model,
                       std::array<GridConfig, 2> config);
double exact_fwer_grid(const ThresholdRule& rule, const GridModel& model,
                       std::array<GridConfig, 2> config);
/// Largest FWER over all 16 configurations (strong control).
double max_fwer_grid(const GridRule& rule, const GridModel& model);

enum class GridCriterion { A1, A2 };

/// A1: min over (Alt, AltBottom) and (AltBottom, Alt) of P(reject >= 1).
/// A2: P_{Alt,Alt}(reject both).
double criterion_value(const GridRule& rule, const GridModel& model, GridCriterion criterion);

/// True when the rule satisfies the monotone decision-rule definition.
bool is_monotone_rule(const GridRule& rule);

struct MaximinResult {
  std::vector<ThresholdRule> maximizers;
  double value;
  std::size_t feasible;
};

/// Enumerates every ThresholdRule with max FWER <= alpha and returns all
/// maximizers of the criterion. When fixed_a is set, only rules with those
/// outer thresholds are searched. Throws if no rule is feasible; m <= 12.
MaximinResult brute_force_maximin(const GridModel& model, double alpha, GridCriterion criterion,
                                  std::optional<std::array<int, 2>> fixed_a = std::nullopt);

struct MonotoneSearchResult {
  double value;
  std::vector<GridRule> maximizers;
  std::size_t monotone_rules;
  std::size_t feasible;
};

/// Enumerates all 4^(m*m) labelings (m <= 3), keeps monotone rules with
/// strong FWER control at alpha and, when required_accept_none is given, the
/// same accept-none cells; returns the criterion maximum.
MonotoneSearchResult enumerate_monotone_rules(
    const GridModel& model, double alpha, GridCriterion criterion,
    const std::optional<std::vector<std::uint8_t>>& required_accept_none = std::nullopt);

/// Discrete counterpart of the continuous constants: b_i is the smallest
/// threshold with P0(X >= b_i) <= alpha, and (a1, a2) maximizes
/// min(P_alt(X1 >= a1), P_alt(X2 >= a2)) subject to
/// P_{0,0}(X1 >= a1 or X2 >= a2) <= alpha, found by scanning the grid.
ThresholdRule discretized_continuous_rule(const GridModel& model, double alpha);

// --- monotone regions and slice operators ---------------------------------

/// Indicator on {1..m}^dims; cell (x_1..x_d) sits at sum (x_i - 1) m^(i-1).
struct GridRegion {
  int m;
  int dims;
  std::vector<std::uint8_t> cells;

  static GridRegion full(int m, int dims);
  static GridRegion empty(int m, int dims);
  bool contains(std::span<const int> x) const;
  std::size_t size() const { return cells.size(); }
  bool operator==(const GridRegion&) const = default;
};

/// Upward closed: x in R and x <= y componentwise implies y in R.
bool is_monotone(const GridRegion& region);

/// Union over z of the cross-sections {x : (x with x_axis = z) in R}.
GridRegion slice_union(const GridRegion& region, int axis);
/// Intersection over z of the cross-sections.
GridRegion slice_intersection(const GridRegion& region, int axis);
/// Cross-section at x_axis = z.
GridRegion slice_at(const GridRegion& region, int axis, int z);

/// Exact probability of the region under independent per-axis pmfs.
double region_probability(const GridRegion& region, std::span<const std::vector<double>> pmfs);

/// Union of `orthants` random upward orthants {x >= c}.
GridRegion random_monotone_region(int m, int dims, int orthants, std::uint64_t seed);

std::vector<double> point_mass(int m, int at);

}  // namespace stepwise::grid
