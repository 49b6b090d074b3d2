#include "stepwise/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "stepwise/error.hpp"

namespace stepwise {

std::vector<std::size_t> Decision::rejected() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == Verdict::Reject) out.push_back(i);
  }
  return out;
}

std::size_t Decision::rejected_count() const {
  return static_cast<std::size_t>(std::count(verdicts.begin(), verdicts.end(), Verdict::Reject));
}

namespace {

void check_statistics(std::span<const double> x, std::size_t k) {
  if (x.size() != k) {
    throw InvalidArgument("statistic count " + std::to_string(x.size()) +
                          " does not match ladder size " + std::to_string(k));
  }
  for (double v : x) {
    if (std::isnan(v)) throw InvalidArgument("statistics must not be NaN");
  }
}

void check_monotone_ladder(std::span<const double> values) {
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] < values[j - 1] - kResidualTolerance) {
      throw NonMonotoneLadder("stepup ladder decreases at d_" + std::to_string(j + 1),
                              static_cast<int>(j + 1));
    }
  }
}

void descending_order(std::span<const double> x, std::vector<std::size_t>& order) {
  order.resize(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
}

void ascending_order(std::span<const double> x, std::vector<std::size_t>& order) {
  order.resize(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
}

}  // namespace

namespace detail {

std::size_t stepdown_count(std::span<const double> x, std::span<const double> values,
                           std::vector<std::size_t>& order) {
  descending_order(x, order);
  const std::size_t k = x.size();
  std::size_t i = 0;
  while (i < k && x[order[i]] >= values[k - 1 - i]) ++i;
  return i;
}

std::size_t stepup_count(std::span<const double> x, std::span<const double> values,
                         std::vector<std::size_t>& order) {
  ascending_order(x, order);
  const std::size_t k = x.size();
  for (std::size_t j = 0; j < k; ++j) {
    if (x[order[j]] > values[j]) return k - j;
  }
  return 0;
}

Decision stepup_decide_unchecked(std::span<const double> x, std::span<const double> values) {
  check_statistics(x, values.size());
  const std::size_t k = x.size();
  std::vector<std::size_t> order;
  ascending_order(x, order);
  Decision d;
  d.verdicts.assign(k, Verdict::Accept);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t idx = order[j];
    const bool exceeds = x[idx] > values[j];
    d.trace.push_back({static_cast<int>(j + 1), idx, x[idx], values[j], exceeds});
    if (exceeds) {
      for (std::size_t m = j; m < k; ++m) d.verdicts[order[m]] = Verdict::Reject;
      break;
    }
  }
  return d;
}

}  // namespace detail

Decision stepdown_decide(std::span<const double> x, const ConstantLadder& ladder) {
  if (ladder.kind != LadderKind::Stepdown) throw InvalidArgument("stepdown_decide needs a stepdown ladder");
  check_statistics(x, ladder.values.size());
  const std::size_t k = x.size();
  std::vector<std::size_t> order;
  descending_order(x, order);
  Decision d;
  d.verdicts.assign(k, Verdict::Accept);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = order[i];
    const double threshold = ladder.values[k - 1 - i];
    const bool passed = x[idx] >= threshold;
    d.trace.push_back({static_cast<int>(i + 1), idx, x[idx], threshold, passed});
    if (!passed) break;
    d.verdicts[idx] = Verdict::Reject;
  }
  return d;
}

Decision stepup_decide(std::span<const double> x, const ConstantLadder& ladder) {
  if (ladder.kind != LadderKind::Stepup) throw InvalidArgument("stepup_decide needs a stepup ladder");
  check_monotone_ladder(ladder.values);
  return detail::stepup_decide_unchecked(x, ladder.values);
}

Decision holm_bonferroni(std::span<const double> p_values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p-values must lie in [0, 1]");
  }
  const std::size_t k = p_values.size();
  std::vector<std::size_t> order;
  ascending_order(p_values, order);
  Decision d;
  d.verdicts.assign(k, Verdict::Accept);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = order[i];
    const double threshold = alpha / static_cast<double>(k - i);
    const bool passed = p_values[idx] <= threshold;
    d.trace.push_back({static_cast<int>(i + 1), idx, p_values[idx], threshold, passed});
    if (!passed) break;
    d.verdicts[idx] = Verdict::Reject;
  }
  return d;
}

std::string_view pair_region_name(PairRegion region) {
  switch (region) {
    case PairRegion::D00:
      return "d00";
    case PairRegion::D01:
      return "d01";
    case PairRegion::D10:
      return "d10";
    case PairRegion::D11:
      return "d11";
  }
  return "?";
}

PairRegion pair_classify(double x1, double x2, const PairConstants& c, PairVariant variant) {
  const auto& a = c.a;
  const auto& b = c.b;
  if (variant == PairVariant::StepdownOpt) {
    // d01 = {X1 < b1, X2 >= a2}, d10 = {X1 >= a1, X2 < b2},
    // d11 = {X1 >= b1, X2 >= b2} and (X1 > a1 or X2 > a2); the rest accepts both.
    if (x1 < b[0] && x2 >= a[1]) return PairRegion::D01;
    if (x1 >= a[0] && x2 < b[1]) return PairRegion::D10;
    if (x1 >= b[0] && x2 >= b[1] && (x1 > a[0] || x2 > a[1])) return PairRegion::D11;
    return PairRegion::D00;
  }
  const auto& at = c.a_tilde;
  // d11 = {X1 > b1, X2 > b2}, d01 = {X1 < b1, X2 >= a~2}, d10 = {X1 >= a~1, X2 < b2}.
  if (x1 > b[0] && x2 > b[1]) return PairRegion::D11;
  if (x1 < b[0] && x2 >= at[1]) return PairRegion::D01;
  if (x1 >= at[0] && x2 < b[1]) return PairRegion::D10;
  return PairRegion::D00;
}

MonotoneReport check_monotone(const DecisionRule& decide, std::span<const double> x,
                              std::size_t trials, std::uint64_t seed) {
  MonotoneReport report;
  report.trials = trials;
  const Decision base = decide(x);
  const std::vector<std::size_t> rejected_x = base.rejected();
  static constexpr double kScales[] = {1e-3, 1e-1, 1.0, 10.0};
  std::vector<double> y(x.size());
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 engine = replicate_engine(seed, t);
    std::exponential_distribution<double> magnitude(1.0);
    std::uniform_int_distribution<int> pick(0, 3);
    std::bernoulli_distribution hold(0.25);
    const double scale = kScales[pick(engine)];
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (base.is_rejected(i)) {
        y[i] = hold(engine) ? x[i] : x[i] + scale * magnitude(engine);
      } else {
        double v = x[i] - scale * magnitude(engine);
        if (!(v < x[i]) && std::isfinite(x[i])) v = std::nextafter(x[i], -kInf);
        y[i] = v;
      }
    }
    const Decision moved = decide(y);
    std::vector<std::size_t> rejected_y = moved.rejected();
    if (rejected_y != rejected_x) {
      report.violations.push_back({y, rejected_x, std::move(rejected_y)});
    }
  }
  return report;
}

}  // namespace stepwise
