#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stepwise/constants.hpp"
#include "stepwise/models.hpp"

namespace stepwise {

enum class ProcedureKind { Stepdown, Stepup, Holm };

std::string_view procedure_kind_name(ProcedureKind kind);
ProcedureKind parse_procedure_kind(std::string_view name);

/// A stepwise rule on the statistic scale. Holm is run as a stepdown rule
/// with Bonferroni thresholds h_j = F0^{-1}(1 - alpha/j).
struct Procedure {
  ProcedureKind kind;
  std::string id;
  double alpha;
  std::vector<double> thresholds;  ///< thresholds[j-1] applies with j hypotheses active

  static Procedure from_ladder(const ConstantLadder& ladder);
  static Procedure holm(const ModelSpec& model, double alpha);
  static Procedure make(ProcedureKind kind, const ModelSpec& model, double alpha);

  int k() const noexcept { return static_cast<int>(thresholds.size()); }

  /// Marks rejected coordinates in mask and returns how many there are.
  std::size_t reject(std::span<const double> x, std::span<std::uint8_t> mask,
                     std::vector<std::size_t>& scratch) const;
};

enum class Metric { Fwer, RejectAtLeast };

struct SimulationTarget {
  Metric metric;
  std::string procedure;
  ThetaVector theta;
  ModelSpec model;
  double alpha;
  int j = 0;               ///< RejectAtLeast only
  bool false_only = false;  ///< count only rejections of false hypotheses (theta_i > 0)
};

/// Binomial estimate with a 3-sigma half-width.
struct SimulationReport {
  double estimate;
  double half_width;
  std::size_t reps;
  std::uint64_t seed;
  SimulationTarget target;

  static SimulationReport from_count(std::size_t hits, std::size_t reps, std::uint64_t seed,
                                     SimulationTarget target);
  bool covers(double value) const { return std::abs(value - estimate) <= half_width; }
};

inline constexpr std::size_t kMinFwerReps = 10'000;

/// P(reject some i with theta_i <= 0). Needs at least one true null.
SimulationReport estimate_fwer(const ModelSpec& model, const ThetaVector& theta,
                               const Procedure& procedure, std::size_t reps, std::uint64_t seed);

/// P(reject >= j hypotheses), or >= j false hypotheses when false_only.
SimulationReport estimate_reject_at_least(const ModelSpec& model, const ThetaVector& theta,
                                          const Procedure& procedure, int j, std::size_t reps,
                                          std::uint64_t seed, bool false_only = false);

struct ProcedureMetrics {
  std::string id;
  std::optional<double> fwer;               ///< absent when theta has no true null
  std::vector<double> reject_at_least;      ///< index j-1 -> P(reject >= j)
  double mean_rejections = 0.0;
};

struct ComparisonRow {
  ThetaVector theta;
  std::vector<ProcedureMetrics> metrics;
  /// count_shortfalls[a][b]: replicates where procedure a rejected fewer than b.
  std::vector<std::vector<std::size_t>> count_shortfalls;
  /// subset_failures[a][b]: replicates where a's rejected set did not contain b's.
  std::vector<std::vector<std::size_t>> subset_failures;

  bool count_dominates(std::size_t a, std::size_t b) const { return count_shortfalls[a][b] == 0; }
  bool superset(std::size_t a, std::size_t b) const { return subset_failures[a][b] == 0; }
};

struct ComparisonTable {
  std::size_t reps;
  std::uint64_t seed;
  std::vector<std::string> procedures;
  std::vector<ComparisonRow> rows;
};

/// Runs every procedure on the same replicates (common random numbers); every
/// theta row reuses the same seed stream.
ComparisonTable compare_procedures(const ModelSpec& model, const std::vector<ThetaVector>& theta_grid,
                                   const std::vector<Procedure>& procedures, std::size_t reps,
                                   std::uint64_t seed);

/// Worker threads used for replicate loops (results never depend on it).
unsigned simulation_threads();
void set_simulation_threads(unsigned n);

}  // namespace stepwise
