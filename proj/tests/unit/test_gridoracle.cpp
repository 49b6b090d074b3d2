#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stepwise/error.hpp"
#include "stepwise/gridoracle.hpp"

using namespace stepwise;
using namespace stepwise::grid;

namespace {

const GridModel& small_model() {
  static const GridModel m = GridModel::make({0.7, 0.2, 0.1}, {0.2, 0.3, 0.5});
  return m;
}

// Direct FWER of a labelled rule: sum over cells with per-axis laws.
double direct_fwer(const GridRule& rule, const std::vector<double>& p1,
                   const std::vector<double>& p2, bool null1, bool null2) {
  double total = 0.0;
  for (int x1 = 1; x1 <= rule.m; ++x1) {
    for (int x2 = 1; x2 <= rule.m; ++x2) {
      const auto l = rule.at(x1, x2);
      if (((l & 1) && null1) || ((l & 2) && null2)) total += p1[x1 - 1] * p2[x2 - 1];
    }
  }
  return total;
}

}  // namespace

TEST_CASE("grid model validation") {
  CHECK_THROWS_AS(GridModel::make({0.5, 0.4}, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(GridModel::make({0.2, 0.8}, {0.6, 0.4}), InvalidArgument);
  const GridModel d = GridModel::discretized_normal(8, 1.0, -0.5, 2.5);
  CHECK(d.m == 8);
  CHECK(d.null_pmf[0] == doctest::Approx(oracle::Phi(-0.5)).epsilon(1e-14));
  CHECK(d.alt_pmf[7] == doctest::Approx(1 - oracle::Phi(1.5)).epsilon(1e-14));
}

TEST_CASE("threshold rule regions") {
  const ThresholdRule r{{3, 3}, {2, 2}};
  const GridRule g = to_grid_rule(r, 3);
  CHECK(g.at(1, 1) == 0);
  CHECK(g.at(2, 2) == 0);
  CHECK(g.at(1, 3) == 2);
  CHECK(g.at(3, 1) == 1);
  CHECK(g.at(2, 3) == 3);
  CHECK(g.at(3, 3) == 3);
  CHECK(is_monotone_rule(g));
}

TEST_CASE("exact FWER against a direct sum") {
  const GridModel& m = small_model();
  const GridRule g = to_grid_rule(ThresholdRule{{3, 3}, {2, 2}}, 3);
  const auto top = point_mass(3, 3);
  const auto bottom = point_mass(3, 1);
  CHECK(exact_fwer_grid(g, m, {GridConfig::Null, GridConfig::Null}) ==
        doctest::Approx(direct_fwer(g, m.null_pmf, m.null_pmf, true, true)));
  CHECK(exact_fwer_grid(g, m, {GridConfig::Null, GridConfig::AltTop}) ==
        doctest::Approx(direct_fwer(g, m.null_pmf, top, true, false)));
  CHECK(exact_fwer_grid(g, m, {GridConfig::AltBottom, GridConfig::Alt}) ==
        doctest::Approx(direct_fwer(g, bottom, m.alt_pmf, true, false)));
  CHECK(exact_fwer_grid(g, m, {GridConfig::Alt, GridConfig::AltTop}) == 0.0);
  CHECK(is_true_null(GridConfig::AltBottom));
  CHECK(!is_true_null(GridConfig::AltTop));
}

TEST_CASE("threshold family optimum agrees with all monotone rules on 3x3") {
  const GridModel& m = small_model();
  const double alpha = 0.31;
  const MaximinResult a1 = brute_force_maximin(m, alpha, GridCriterion::A1);
  const MonotoneSearchResult e1 = enumerate_monotone_rules(m, alpha, GridCriterion::A1);
  CHECK(e1.value == doctest::Approx(a1.value).epsilon(1e-12));
  CHECK(e1.monotone_rules > 0);
  const ThresholdRule disc = discretized_continuous_rule(m, alpha);
  CHECK(disc.a == std::array<int, 2>{3, 3});
  CHECK(disc.b == std::array<int, 2>{2, 2});
  const GridRule rule = to_grid_rule(disc, 3);
  std::vector<std::uint8_t> accept_none(9);
  for (int c = 0; c < 9; ++c) accept_none[c] = rule.labels[c] == 0;
  const MaximinResult a2 = brute_force_maximin(m, alpha, GridCriterion::A2, disc.a);
  const MonotoneSearchResult e2 = enumerate_monotone_rules(m, alpha, GridCriterion::A2, accept_none);
  CHECK(e2.value == doctest::Approx(a2.value).epsilon(1e-12));
  CHECK(criterion_value(rule, m, GridCriterion::A2) == doctest::Approx(a2.value).epsilon(1e-12));
}

TEST_CASE("discretized constants reach the brute-force optimum at m = 8") {
  const GridModel m = GridModel::discretized_normal(8, 1.5, -0.5, 2.5);
  const double alpha = 0.1;
  const ThresholdRule disc = discretized_continuous_rule(m, alpha);
  const GridRule rule = to_grid_rule(disc, 8);
  CHECK(max_fwer_grid(rule, m) <= alpha);
  const MaximinResult a1 = brute_force_maximin(m, alpha, GridCriterion::A1);
  CHECK(criterion_value(rule, m, GridCriterion::A1) == doctest::Approx(a1.value).epsilon(1e-12));
  CHECK(std::find(a1.maximizers.begin(), a1.maximizers.end(), disc) != a1.maximizers.end());
}

TEST_CASE("non-monotone rule detection") {
  GridRule g{3, std::vector<std::uint8_t>(9, 0)};
  g.labels[0] = 3;
  CHECK(!is_monotone_rule(g));
  CHECK_THROWS_AS(enumerate_monotone_rules(GridModel::discretized_normal(4, 1, -1, 1), 0.1,
                                           GridCriterion::A1),
                  InvalidArgument);
}

TEST_CASE("slice operators") {
  const GridRegion full = GridRegion::full(4, 3);
  CHECK(slice_union(full, 2) == GridRegion::full(4, 2));
  CHECK(slice_intersection(full, 0) == GridRegion::full(4, 2));
  CHECK(slice_union(GridRegion::empty(4, 3), 1) == GridRegion::empty(4, 2));

  GridRegion bad = GridRegion::empty(3, 2);
  bad.cells[0] = 1;
  CHECK(!is_monotone(bad));
  CHECK_THROWS_AS(slice_union(bad, 0), InvalidArgument);

  std::mt19937_64 g(12);
  for (int n = 0; n < 50; ++n) {
    const GridRegion r = random_monotone_region(4, 3, 1 + n % 4, g());
    REQUIRE(is_monotone(r));
    for (int axis = 0; axis < 3; ++axis) {
      const GridRegion u = slice_union(r, axis);
      const GridRegion i = slice_intersection(r, axis);
      CHECK(is_monotone(u));
      CHECK(is_monotone(i));
      for (int z = 1; z <= 4; ++z) {
        const GridRegion s = slice_at(r, axis, z);
        for (std::size_t c = 0; c < s.size(); ++c) {
          CHECK(i.cells[c] <= s.cells[c]);
          CHECK(s.cells[c] <= u.cells[c]);
        }
      }
    }
  }
}

TEST_CASE("slice union carries the probability at the top limit") {
  std::mt19937_64 g(13);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int n = 0; n < 30; ++n) {
    const int m = 3 + n % 3;
    const GridRegion r = random_monotone_region(m, 3, 2, g());
    std::vector<std::vector<double>> pmfs(3, std::vector<double>(m));
    for (int a = 0; a < 2; ++a) {
      double s = 0;
      for (double& p : pmfs[a]) s += (p = u(g));
      for (double& p : pmfs[a]) p /= s;
    }
    pmfs[2] = point_mass(m, m);
    const std::span<const std::vector<double>> two(pmfs.data(), 2);
    CHECK(region_probability(r, pmfs) == doctest::Approx(region_probability(slice_union(r, 2), two)).epsilon(1e-14));
    pmfs[2] = point_mass(m, 1);
    CHECK(region_probability(r, pmfs) ==
          doctest::Approx(region_probability(slice_intersection(r, 2), two)).epsilon(1e-14));
  }
}
