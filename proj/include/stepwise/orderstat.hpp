#pragma once

#include <span>
#include <vector>

#include "stepwise/models.hpp"

namespace stepwise {

/// Nondecreasing threshold sequence for ascending order statistics.
/// Entries may be +-inf.
class ThresholdLadder {
 public:
  explicit ThresholdLadder(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// P(X_{j:i} <= ladder_i for i = 1..j), where X_{j:1} <= ... <= X_{j:j} are
/// the ascending order statistics of j null coordinates.
double joint_orderstat_cdf(const ModelSpec& model, int j, const ThresholdLadder& ladder);

/// P(X_{j:i} > ladder_i for i = 1..j) with all j coordinates at theta = shift.
double joint_orderstat_survival(const ModelSpec& model, int j, const ThresholdLadder& ladder,
                                double shift);

namespace detail {

/// For j i.i.d. U(0,1) draws and nondecreasing levels u_1..u_j in [0,1],
/// returns P(#{U <= u_i} >= i for every i). O(j^3) DP over cell counts.
double uniform_ladder_probability(std::span<const double> u);

/// joint_orderstat_cdf at a common shift (sentinels allowed).
double joint_orderstat_cdf_at(const ModelSpec& model, int j, std::span<const double> ladder,
                              double shift);

}  // namespace detail

}  // namespace stepwise
