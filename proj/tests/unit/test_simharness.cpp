#include "doctest.h"
#include "oracles.hpp"
#include "stepwise/error.hpp"
#include "stepwise/power.hpp"
#include "stepwise/simharness.hpp"

using namespace stepwise;

namespace {

bool within(const SimulationReport& r, double p0, double sigmas = 4.0) {
  return std::abs(r.estimate - p0) <= sigmas * std::sqrt(p0 * (1 - p0) / r.reps);
}

}  // namespace

TEST_CASE("holm thresholds on the statistic scale") {
  const Procedure h = Procedure::holm(ModelSpec::iid_normal(3), 0.05);
  CHECK(h.kind == ProcedureKind::Holm);
  for (int j = 1; j <= 3; ++j) {
    CHECK(1 - oracle::Phi(h.thresholds[j - 1]) == doctest::Approx(0.05 / j).epsilon(1e-12));
  }
}

TEST_CASE("report half-width") {
  const ModelSpec m = ModelSpec::iid_normal(1);
  const SimulationReport r =
      SimulationReport::from_count(250, 1000, 3, {Metric::Fwer, "x", ThetaVector({0.0}), m, 0.05});
  CHECK(r.estimate == 0.25);
  CHECK(r.half_width == doctest::Approx(3 * std::sqrt(0.25 * 0.75 / 1000)));
  CHECK(r.covers(0.27));
  CHECK(!r.covers(0.3));
}

TEST_CASE("FWER at the least-favorable configuration is alpha") {
  const ModelSpec m = ModelSpec::iid_normal(3);
  const Procedure sd = Procedure::make(ProcedureKind::Stepdown, m, 0.05);
  const Procedure su = Procedure::make(ProcedureKind::Stepup, m, 0.05);
  const ThetaVector theta({0.0, 0.0, kInf});
  CHECK(within(estimate_fwer(m, theta, sd, 200'000, 1), 0.05));
  CHECK(within(estimate_fwer(m, theta, su, 200'000, 1), 0.05));
  const Procedure holm = Procedure::make(ProcedureKind::Holm, m, 0.05);
  CHECK(estimate_fwer(m, theta, holm, 200'000, 1).estimate < 0.05);
}

TEST_CASE("power estimate matches the analytic criterion") {
  const ModelSpec m = ModelSpec::equicorr_normal(4, 0.5);
  const ConstantLadder f = solve_stepdown(m, 0.05);
  const Procedure sd = Procedure::from_ladder(f);
  for (int j = 1; j <= 4; ++j) {
    const SimulationReport r = estimate_reject_at_least(m, lfc_theta(4, j, 1.5), sd, j, 200'000, 5);
    CHECK(within(r, beta_stepdown(f, 4, j, 1.5)));
  }
}

TEST_CASE("results do not depend on the thread count") {
  const ModelSpec m = ModelSpec::iid_normal(4);
  const Procedure sd = Procedure::make(ProcedureKind::Stepdown, m, 0.1);
  const ThetaVector theta({0.0, 1.0, 2.0, 0.0});
  set_simulation_threads(1);
  const SimulationReport a = estimate_fwer(m, theta, sd, 100'000, 9);
  set_simulation_threads(4);
  const SimulationReport b = estimate_fwer(m, theta, sd, 100'000, 9);
  set_simulation_threads(0);
  CHECK(a.estimate == b.estimate);
  const SimulationReport c = estimate_fwer(m, theta, sd, 100'000, 10);
  CHECK(c.estimate != a.estimate);
}

TEST_CASE("argument checks") {
  const ModelSpec m = ModelSpec::iid_normal(2);
  const Procedure sd = Procedure::make(ProcedureKind::Stepdown, m, 0.05);
  CHECK_THROWS_AS(estimate_fwer(m, ThetaVector({1.0, 2.0}), sd, 20'000, 1), InvalidArgument);
  CHECK_THROWS_AS(estimate_fwer(m, ThetaVector({0.0, 0.0}), sd, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(estimate_fwer(m, ThetaVector({0.0}), sd, 20'000, 1), InvalidArgument);
  CHECK(estimate_reject_at_least(m, ThetaVector({0.0, 0.0}), sd, 0, 10, 1).estimate == 1.0);
  const ModelSpec u = ModelSpec::iid_uniform_null(2);
  const Procedure su = Procedure::make(ProcedureKind::Stepdown, u, 0.05);
  CHECK_THROWS_AS(estimate_reject_at_least(u, ThetaVector({1.0, 0.0}), su, 1, 10, 1), ModelError);
}

TEST_CASE("false-only counts agree at the power configuration") {
  const ModelSpec m = ModelSpec::iid_normal(3);
  const Procedure su = Procedure::make(ProcedureKind::Stepup, m, 0.05);
  const ThetaVector w = lfc_theta(3, 2, 1.0);
  for (int j = 1; j <= 3; ++j) {
    CHECK(estimate_reject_at_least(m, w, su, j, 50'000, 2).estimate ==
          estimate_reject_at_least(m, w, su, j, 50'000, 2, true).estimate);
  }
}

TEST_CASE("comparison table with common random numbers") {
  const ModelSpec m = ModelSpec::iid_normal(4);
  const std::vector<Procedure> procs{Procedure::make(ProcedureKind::Stepdown, m, 0.05),
                                     Procedure::make(ProcedureKind::Holm, m, 0.05),
                                     Procedure::make(ProcedureKind::Stepup, m, 0.05)};
  const std::vector<ThetaVector> grid{ThetaVector({0, 0, 0, 0}), ThetaVector({1, 2, 3, 3}),
                                      ThetaVector({0, 2, kInf, -kInf})};
  const ComparisonTable t = compare_procedures(m, grid, procs, 50'000, 4);
  REQUIRE(t.rows.size() == 3);
  for (const ComparisonRow& row : t.rows) {
    CHECK(row.superset(0, 1));
    CHECK(row.count_dominates(0, 1));
    for (std::size_t p = 0; p < 3; ++p) {
      const auto& r = row.metrics[p].reject_at_least;
      for (std::size_t j = 1; j < r.size(); ++j) CHECK(r[j] <= r[j - 1]);
    }
  }
  CHECK(!t.rows[1].metrics[0].fwer.has_value());
  CHECK(t.rows[0].metrics[0].fwer.has_value());
  // Single-procedure runs see the same replicates.
  const SimulationReport solo = estimate_fwer(m, grid[0], procs[0], 50'000, 4);
  CHECK(*t.rows[0].metrics[0].fwer == solo.estimate);
  CHECK_THROWS_AS(compare_procedures(m, grid, {procs[0]}, 10, 1), InvalidArgument);
}
