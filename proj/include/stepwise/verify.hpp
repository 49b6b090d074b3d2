#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stepwise/constants.hpp"

namespace stepwise::verify {

enum class Level { Fast, Slow };

std::string_view level_name(Level level);
Level parse_level(std::string_view name);

/// Monte Carlo replicates per estimate: 10^5 (fast) or 10^6 (slow).
std::size_t simulation_reps(Level level);

struct Options {
  Level level = Level::Fast;
  std::uint64_t seed = 20240611;
  /// Extra ladders whose residuals are checked alongside the suite.
  std::vector<ConstantLadder> supplied;
};

struct CheckResult {
  int criterion;  ///< 1..10; 0 for supplied-constant checks
  std::string name;
  bool passed;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
};

CheckResult check_closed_form_constants(const Options& options);
CheckResult check_ladder_identities(const Options& options);
CheckResult check_pair_ordering(const Options& options);
CheckResult check_lfc_fwer(const Options& options);
CheckResult check_power_formulas(const Options& options);
CheckResult check_pair_tradeoff(const Options& options);
CheckResult check_monotone_rules(const Options& options);
CheckResult check_grid_oracle(const Options& options);
CheckResult check_slice_identities(const Options& options);
CheckResult check_dominance(const Options& options);

/// Recomputes every residual of a ladder and fails on any above tolerance.
CheckResult check_supplied_ladder(const ConstantLadder& ladder);

/// Runs the ten criteria in order, then the supplied-ladder checks. The grid
/// oracle runs at the slow level only.
std::vector<CheckResult> run_suite(const Options& options);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace stepwise::verify
