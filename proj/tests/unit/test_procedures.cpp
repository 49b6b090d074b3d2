#include <random>

#include "doctest.h"
#include "stepwise/error.hpp"
#include "stepwise/procedures.hpp"

using namespace stepwise;

namespace {

std::vector<std::size_t> rejected(const Decision& d) { return d.rejected(); }

ConstantLadder manual_ladder(LadderKind kind, std::vector<double> values) {
  const int k = static_cast<int>(values.size());
  return {kind, 0.05, ModelSpec::iid_uniform_null(k), std::move(values), {}};
}

}  // namespace

TEST_CASE("stepdown worked example on the uniform ladder") {
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_uniform_null(3), 0.05);
  const std::vector<double> x{0.99, 0.98, 0.10};
  const Decision d = stepdown_decide(x, f);
  CHECK(rejected(d) == std::vector<std::size_t>{0, 1});
  REQUIRE(d.trace.size() == 3);
  CHECK(d.trace[0].threshold == f.values[2]);
  CHECK(d.trace[1].threshold == f.values[1]);
  CHECK(d.trace[2].passed == false);
}

TEST_CASE("stepdown gate uses the largest constant first") {
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_normal(2), 0.05);
  const double f1 = f.values[0], f2 = f.values[1];
  CHECK(stepdown_decide(std::vector<double>{f2 + 1, f1 + 1}, f).rejected_count() == 2);
  const double delta = 0.5 * (f2 - f1);
  const Decision d = stepdown_decide(std::vector<double>{f2 - delta, f2 - delta}, f);
  CHECK(d.rejected_count() == 0);
  CHECK(d.trace.size() == 1);
  CHECK(d.trace[0].hypothesis == 0);
}

TEST_CASE("stepup worked examples on the uniform ladder") {
  const ConstantLadder d = solve_stepup(ModelSpec::iid_uniform_null(2), 0.05);
  CHECK(stepup_decide(std::vector<double>{0.96, 0.94}, d).rejected_count() == 0);
  CHECK(rejected(stepup_decide(std::vector<double>{0.98, 0.94}, d)) == std::vector<std::size_t>{0});
  CHECK(stepup_decide(std::vector<double>{0.951, 0.99}, d).rejected_count() == 2);
}

TEST_CASE("stepup rejects a decreasing ladder") {
  const ConstantLadder bad = manual_ladder(LadderKind::Stepup, {0.9, 0.8});
  CHECK_THROWS_AS(stepup_decide(std::vector<double>{0.5, 0.5}, bad), NonMonotoneLadder);
  try {
    stepup_decide(std::vector<double>{0.5, 0.5}, bad);
  } catch (const NonMonotoneLadder& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("length mismatch") {
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_normal(3), 0.05);
  CHECK_THROWS_AS(stepdown_decide(std::vector<double>{1.0, 2.0}, f), InvalidArgument);
  CHECK_THROWS_AS(stepdown_decide(std::vector<double>{1.0, std::nan(""), 2.0}, f), InvalidArgument);
}

TEST_CASE("ties are processed by original index") {
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_normal(3), 0.05);
  const Decision d = stepdown_decide(std::vector<double>{5.0, 5.0, 5.0}, f);
  REQUIRE(d.trace.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(d.trace[i].hypothesis == static_cast<std::size_t>(i));
}

TEST_CASE("sentinel coordinates") {
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_normal(3), 0.05);
  const ConstantLadder d = solve_stepup(ModelSpec::iid_normal(3), 0.05);
  const std::vector<double> x{kInf, -kInf, 0.3};
  CHECK(rejected(stepdown_decide(x, f)) == std::vector<std::size_t>{0});
  CHECK(rejected(stepup_decide(x, d)) == std::vector<std::size_t>{0});
  const std::vector<double> all_high{kInf, kInf, -kInf};
  CHECK(rejected(stepup_decide(all_high, d)) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("holm worked examples") {
  CHECK(holm_bonferroni(std::vector<double>{0.01, 0.03}, 0.05).rejected_count() == 2);
  CHECK(holm_bonferroni(std::vector<double>{0.2, 0.5, 0.06}, 0.05).rejected_count() == 0);
  CHECK(holm_bonferroni(std::vector<double>{0.04, 0.001}, 0.05).rejected_count() == 2);
  CHECK(holm_bonferroni(std::vector<double>{0.03, 0.001}, 0.05).rejected_count() == 2);
  CHECK(rejected(holm_bonferroni(std::vector<double>{0.06, 0.001}, 0.05)) ==
        std::vector<std::size_t>{1});
  CHECK_THROWS_AS(holm_bonferroni(std::vector<double>{1.2}, 0.05), InvalidArgument);
}

TEST_CASE("exact first-step threshold exceeds Holm's at k = 4") {
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_normal(4), 0.05);
  const double c41 = marginal_sf(f.model, 0.0, f.step_threshold(1));
  CHECK(c41 == doctest::Approx(1 - std::pow(0.95, 0.25)).epsilon(1e-10));
  CHECK(c41 == doctest::Approx(0.012741).epsilon(1e-4));
  CHECK(c41 > 0.05 / 4);
}

TEST_CASE("pair classification examples") {
  const PairConstants c = solve_pair_constants(ModelSpec::iid_normal(2), 0.05, {1.0, 1.0});
  CHECK(pair_classify(c.b[0] - 1, c.a[1] + 1, c, PairVariant::StepdownOpt) == PairRegion::D01);
  CHECK(pair_classify(c.a[0] + 1, c.b[1] - 1, c, PairVariant::StepdownOpt) == PairRegion::D10);
  CHECK(pair_classify(0.0, 0.0, c, PairVariant::StepdownOpt) == PairRegion::D00);
  CHECK(pair_classify(c.a_tilde[0] + 1, c.a_tilde[1] + 1, c, PairVariant::StepupOpt) == PairRegion::D11);
  const double mid = 0.5 * (c.b[0] + c.a[0]);
  CHECK(pair_classify(mid, mid, c, PairVariant::StepdownOpt) == PairRegion::D00);
  CHECK(pair_classify(mid, mid, c, PairVariant::StepupOpt) == PairRegion::D11);
  CHECK(pair_classify(c.b[0] - 1, c.a_tilde[1], c, PairVariant::StepupOpt) == PairRegion::D01);
  CHECK(pair_classify(c.b[0] - 1, 0.5 * (c.a[1] + c.a_tilde[1]), c, PairVariant::StepupOpt) ==
        PairRegion::D00);
}

TEST_CASE("stepdown-optimal pair rule equals the k = 2 stepdown procedure") {
  const ModelSpec m = ModelSpec::iid_normal(2);
  const PairConstants c = solve_pair_constants(m, 0.05, {1.5, 1.5});
  const ConstantLadder f = solve_stepdown(m, 0.05);
  CHECK(c.a[0] == doctest::Approx(f.step_threshold(1)).epsilon(1e-11));
  CHECK(c.b[0] == f.step_threshold(2));
  std::mt19937_64 g(4);
  std::normal_distribution<double> n(1.0, 1.5);
  for (int r = 0; r < 100'000; ++r) {
    const std::vector<double> x{n(g), n(g)};
    const Decision d = stepdown_decide(x, f);
    const PairRegion region = pair_classify(x[0], x[1], c, PairVariant::StepdownOpt);
    const bool r1 = region == PairRegion::D10 || region == PairRegion::D11;
    const bool r2 = region == PairRegion::D01 || region == PairRegion::D11;
    REQUIRE(d.is_rejected(0) == r1);
    REQUIRE(d.is_rejected(1) == r2);
  }
}

TEST_CASE("rejection count is monotone and nested") {
  const ModelSpec m = ModelSpec::iid_normal(4);
  const ConstantLadder f = solve_stepdown(m, 0.05);
  const ConstantLadder d = solve_stepup(m, 0.05);
  std::mt19937_64 g(5);
  std::normal_distribution<double> n(1.5, 1.5);
  std::exponential_distribution<double> up(2.0);
  for (int r = 0; r < 20'000; ++r) {
    std::vector<double> x(4), y(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = n(g);
      y[i] = x[i] + up(g);
    }
    CHECK(stepdown_decide(y, f).rejected_count() >= stepdown_decide(x, f).rejected_count());
    CHECK(stepup_decide(y, d).rejected_count() >= stepup_decide(x, d).rejected_count());
  }
}

TEST_CASE("permutation equivariance") {
  const ConstantLadder d = solve_stepup(ModelSpec::iid_normal(4), 0.05);
  const std::vector<double> x{2.5, 0.1, 2.2, 1.9};
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<double> y(4);
  for (int i = 0; i < 4; ++i) y[i] = x[perm[i]];
  const Decision dx = stepup_decide(x, d);
  const Decision dy = stepup_decide(y, d);
  for (int i = 0; i < 4; ++i) CHECK(dy.is_rejected(i) == dx.is_rejected(perm[i]));
}

TEST_CASE("stepup can reject fewer hypotheses than stepdown") {
  // f_2 < x_1 <= d_2 and x_2 < f_1: stepdown rejects H1, stepup rejects nothing.
  const ConstantLadder f = solve_stepdown(ModelSpec::iid_uniform_null(2), 0.05);
  const ConstantLadder d = solve_stepup(ModelSpec::iid_uniform_null(2), 0.05);
  const std::vector<double> x{0.9748, 0.5};
  CHECK(f.values[1] < x[0]);
  CHECK(x[0] <= d.values[1]);
  CHECK(stepdown_decide(x, f).rejected_count() == 1);
  CHECK(stepup_decide(x, d).rejected_count() == 0);
}

TEST_CASE("monotone rules pass the perturbation check") {
  const ModelSpec m = ModelSpec::iid_normal(5);
  const ConstantLadder f = solve_stepdown(m, 0.05);
  const ConstantLadder d = solve_stepup(m, 0.05);
  const std::vector<double> x{3.1, 2.4, 0.2, 2.6, -0.5};
  CHECK(check_monotone([&](std::span<const double> v) { return stepdown_decide(v, f); }, x, 10'000, 1).ok());
  CHECK(check_monotone([&](std::span<const double> v) { return stepup_decide(v, d); }, x, 10'000, 2).ok());
}

TEST_CASE("a decreasing stepup ladder still induces a monotone rule") {
  const std::vector<double> decreasing{2.5, 1.0, 0.5};
  std::mt19937_64 g(6);
  std::normal_distribution<double> n(1.0, 1.5);
  for (int base = 0; base < 20; ++base) {
    const std::vector<double> x{n(g), n(g), n(g)};
    const MonotoneReport rep = check_monotone(
        [&](std::span<const double> v) { return detail::stepup_decide_unchecked(v, decreasing); },
        x, 2'000, base);
    CHECK(rep.ok());
  }
}

TEST_CASE("an isolated rejection island is caught") {
  auto rule = [](std::span<const double> v) {
    Decision d;
    const bool island = v[0] > 0 && v[0] < 1 && v[1] > 0 && v[1] < 1;
    const bool high = v[0] > 3 && v[1] > 3;
    d.verdicts.assign(2, island || high ? Verdict::Reject : Verdict::Accept);
    return d;
  };
  const std::vector<double> x{0.5, 0.5};
  const MonotoneReport rep = check_monotone(rule, x, 10'000, 3);
  CHECK(!rep.ok());
  REQUIRE(!rep.violations.empty());
  CHECK(rep.violations[0].rejected_x == std::vector<std::size_t>{0, 1});
}
