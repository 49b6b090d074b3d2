#include "stepwise/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "stepwise/error.hpp"
#include "stepwise/gridoracle.hpp"
#include "stepwise/power.hpp"
#include "stepwise/procedures.hpp"
#include "stepwise/simharness.hpp"

namespace stepwise::verify {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// Collects failures; the first few go into the detail string.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_.push_back(what);
  }
  void note(std::string s) { extra_.push_back(std::move(s)); }
  bool ok() const { return failures_ == 0; }

  std::string summary() const {
    std::string out = fmt("%zu/%zu checks passed", checks_ - failures_, checks_);
    for (const auto& n : notes_) out += "; FAIL " + n;
    if (failures_ > notes_.size()) out += fmt("; ... %zu more", failures_ - notes_.size());
    for (const auto& e : extra_) out += "; " + e;
    return out;
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> extra_;
};

template <class Body>
CheckResult timed(int criterion, std::string name, Body body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{criterion, std::move(name), false, false, {}, 0.0};
  try {
    Tally tally;
    body(tally);
    r.passed = tally.ok();
    r.detail = tally.summary();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double uniform01(SplitMix64& g) { return std::uniform_real_distribution<double>(0.0, 1.0)(g); }

Decision pair_decision(PairRegion region) {
  Decision d;
  d.verdicts.assign(2, Verdict::Accept);
  if (region == PairRegion::D10 || region == PairRegion::D11) d.verdicts[0] = Verdict::Reject;
  if (region == PairRegion::D01 || region == PairRegion::D11) d.verdicts[1] = Verdict::Reject;
  return d;
}

// Compares a simulated frequency with an analytic probability p0 using the
// 3-sigma band of the binomial at p0.
bool agrees(const SimulationReport& r, double p0) {
  const double band = 3.0 * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(r.reps));
  return std::abs(r.estimate - p0) <= std::max(band, 1e-12);
}

double band_ratio(const SimulationReport& r, double p0) {
  const double band = 3.0 * std::sqrt(p0 * (1.0 - p0) / static_cast<double>(r.reps));
  return band > 0 ? std::abs(r.estimate - p0) / band : 0.0;
}

}  // namespace

std::string_view level_name(Level level) { return level == Level::Fast ? "fast" : "slow"; }

Level parse_level(std::string_view name) {
  if (name == "fast") return Level::Fast;
  if (name == "slow") return Level::Slow;
  throw InvalidArgument("unknown verification level '" + std::string(name) + "'");
}

std::size_t simulation_reps(Level level) { return level == Level::Fast ? 100'000 : 1'000'000; }

CheckResult check_closed_form_constants(const Options&) {
  return timed(1, "closed-form constants", [](Tally& t) {
    const auto t0 = std::chrono::steady_clock::now();
    const double alpha = 0.05;
    const ModelSpec model = ModelSpec::iid_uniform_null(8);
    const ConstantLadder f = solve_stepdown(model, alpha);
    const ConstantLadder d = solve_stepup(model, alpha);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (int j = 1; j <= 8; ++j) {
      const double want = std::pow(1.0 - alpha, 1.0 / j);
      t.expect(std::abs(f.values[j - 1] - want) <= 1e-10,
               fmt("f_%d = %.15g, closed form %.15g", j, f.values[j - 1], want));
      t.expect(std::abs(f.residuals[j - 1]) <= kResidualTolerance,
               fmt("stepdown residual at j=%d is %.3g", j, f.residuals[j - 1]));
      t.expect(std::abs(d.residuals[j - 1]) <= kResidualTolerance,
               fmt("stepup residual at j=%d is %.3g", j, d.residuals[j - 1]));
    }
    t.expect(std::abs(d.values[0] - 0.95) <= 1e-10, fmt("d_1 = %.15g", d.values[0]));
    t.expect(std::abs(d.values[1] - 0.975) <= 1e-10, fmt("d_2 = %.15g", d.values[1]));
    t.expect(elapsed < 1.0, fmt("solve took %.3f s", elapsed));
    t.note(fmt("d_2 - 0.975 = %.2e, solve %.4f s", d.values[1] - 0.975, elapsed));
  });
}

CheckResult check_ladder_identities(const Options&) {
  return timed(2, "ladder identities", [](Tally& t) {
    const double alpha = 0.05;
    const std::vector<ModelSpec> models{ModelSpec::iid_normal(8),
                                        ModelSpec::equicorr_normal(8, 0.25),
                                        ModelSpec::equicorr_normal(8, 0.5)};
    for (const ModelSpec& model : models) {
      const ConstantLadder f = solve_stepdown(model, alpha);
      const ConstantLadder d = solve_stepup(model, alpha);
      const std::string name = model.describe();
      t.expect(std::abs(f.values[0] - d.values[0]) <= 1e-10,
               fmt("%s: f_1 = %.15g, d_1 = %.15g", name.c_str(), f.values[0], d.values[0]));
      for (int j = 2; j <= 8; ++j) {
        t.expect(f.values[j - 1] < d.values[j - 1],
                 fmt("%s: f_%d = %.12g not below d_%d = %.12g", name.c_str(), j,
                     f.values[j - 1], j, d.values[j - 1]));
      }
      for (const auto& ladder : {f, d}) {
        for (double r : ladder.residuals) {
          t.expect(std::abs(r) <= kResidualTolerance, fmt("%s residual %.3g", name.c_str(), r));
        }
      }
      // Solving for k and k - 1 must give the same shared constants, so that
      // c_{k,j} = f_{k-j+1} equals c_{k-1,j-1}.
      for (LadderKind kind : {LadderKind::Stepdown, LadderKind::Stepup}) {
        for (int k = 2; k <= 8; ++k) {
          const ConstantLadder big = solve_ladder(kind, model.with_k(k), alpha);
          const ConstantLadder small = solve_ladder(kind, model.with_k(k - 1), alpha);
          for (int j = 2; j <= k; ++j) {
            t.expect(big.step_threshold(j) == small.step_threshold(j - 1),
                     fmt("%s %s: c_{%d,%d} != c_{%d,%d}", name.c_str(),
                         std::string(ladder_kind_name(kind)).c_str(), k, j, k - 1, j - 1));
          }
        }
      }
    }
    // p-value scale: c on the p-scale is the null upper tail at the statistic threshold.
    for (const ModelSpec& model : {ModelSpec::iid_normal(8), ModelSpec::iid_uniform_null(8)}) {
      for (int k = 1; k <= 8; ++k) {
        const ConstantLadder f = solve_stepdown(model.with_k(k), alpha);
        for (int j = 1; j <= k; ++j) {
          const double c = marginal_sf(model, 0.0, f.step_threshold(j));
          const double lhs = 1.0 - std::pow(1.0 - c, k - j + 1);
          t.expect(std::abs(lhs - alpha) <= 1e-9,
                   fmt("p-scale identity k=%d j=%d gives %.15g", k, j, lhs));
        }
      }
    }
  });
}

CheckResult check_pair_ordering(const Options& options) {
  return timed(3, "pair-constant ordering", [&](Tally& t) {
    SplitMix64 g = replicate_engine(options.seed, 3);
    for (int fixture = 0; fixture < 10; ++fixture) {
      const bool corr = fixture % 2 == 1;
      const double rho = corr ? 0.1 + 0.7 * uniform01(g) : 0.0;
      const ModelSpec model = corr ? ModelSpec::equicorr_normal(2, rho) : ModelSpec::iid_normal(2);
      const double alpha = 0.01 + 0.19 * uniform01(g);
      const std::array<double, 2> eps{0.25 + 2.75 * uniform01(g), 0.25 + 2.75 * uniform01(g)};
      const std::string name = fmt("%s alpha=%.4f eps=(%.3f,%.3f)", model.describe().c_str(),
                                   alpha, eps[0], eps[1]);
      const PairStepdownResult sd = solve_pair_stepdown(model, alpha, eps);
      const PairStepupResult su = solve_pair_stepup(model, alpha, eps, sd.b);
      for (int i = 0; i < 2; ++i) {
        t.expect(sd.b[i] < sd.a[i] && sd.a[i] < su.a_tilde[i],
                 fmt("%s: b_%d=%.10g a_%d=%.10g a~_%d=%.10g", name.c_str(), i + 1, sd.b[i],
                     i + 1, sd.a[i], i + 1, su.a_tilde[i]));
        t.expect(std::abs(sd.b_residuals[i]) <= kResidualTolerance,
                 fmt("%s: b_%d residual %.3g", name.c_str(), i + 1, sd.b_residuals[i]));
      }
      t.expect(std::abs(sd.level_residual) <= kResidualTolerance,
               fmt("%s: stepdown level residual %.3g", name.c_str(), sd.level_residual));
      t.expect(std::abs(su.level_residual) <= kResidualTolerance,
               fmt("%s: stepup level residual %.3g", name.c_str(), su.level_residual));
      // Equal marginal power at the outer thresholds, recomputed independently.
      const double bal = marginal_sf(model, eps[0], sd.a[0]) - marginal_sf(model, eps[1], sd.a[1]);
      const double bal_t =
          marginal_sf(model, eps[0], su.a_tilde[0]) - marginal_sf(model, eps[1], su.a_tilde[1]);
      t.expect(std::abs(bal) <= kResidualTolerance && std::abs(bal_t) <= kResidualTolerance,
               fmt("%s: power balance residuals %.3g %.3g", name.c_str(), bal, bal_t));
      const std::array<double, 2> zero{0.0, 0.0};
      const double level = 1.0 - lower_orthant(model, zero, sd.a);
      t.expect(std::abs(level - alpha) <= kResidualTolerance,
               fmt("%s: P(X1>a1 or X2>a2) = %.15g", name.c_str(), level));
      const double accept = pair_accept_none_probability(model, su.a_tilde, sd.b);
      t.expect(std::abs(accept - (1.0 - alpha)) <= kResidualTolerance,
               fmt("%s: stepup accept-none probability %.15g", name.c_str(), accept));
    }
  });
}

CheckResult check_lfc_fwer(const Options& options) {
  return timed(4, "FWER at least-favorable configurations", [&](Tally& t) {
    const double alpha = 0.05;
    const std::size_t reps = simulation_reps(options.level);
    double worst = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const ModelSpec model = ModelSpec::iid_normal(k);
      const Procedure sd = Procedure::make(ProcedureKind::Stepdown, model, alpha);
      const Procedure su = Procedure::make(ProcedureKind::Stepup, model, alpha);
      for (int p = 1; p <= k; ++p) {
        const ThetaVector theta = null_lfc_theta(k, k - p + 1);
        const std::uint64_t seed = options.seed + 100 * k + p;
        const SimulationReport a = estimate_fwer(model, theta, sd, reps, seed);
        const SimulationReport b = estimate_fwer(model, theta, su, reps, seed);
        worst = std::max({worst, std::abs(a.estimate - alpha) / a.half_width,
                          std::abs(b.estimate - alpha) / b.half_width});
        t.expect(a.covers(alpha), fmt("stepdown k=%d p=%d: %.6f +- %.6f", k, p, a.estimate,
                                      a.half_width));
        t.expect(b.estimate <= alpha + b.half_width,
                 fmt("stepup k=%d p=%d: %.6f exceeds alpha + %.6f", k, p, b.estimate,
                     b.half_width));
        t.expect(b.covers(alpha), fmt("stepup k=%d p=%d: %.6f +- %.6f not at alpha", k, p,
                                      b.estimate, b.half_width));
      }
    }
    t.note(fmt("%zu reps, largest |estimate - alpha| = %.2f half-widths", reps, worst));
  });
}

CheckResult check_power_formulas(const Options& options) {
  return timed(5, "maximin power formulas", [&](Tally& t) {
    const double alpha = 0.05;
    const std::size_t reps = simulation_reps(options.level);
    double worst = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const ModelSpec model = ModelSpec::iid_normal(k);
      const ConstantLadder f = solve_stepdown(model, alpha);
      const ConstantLadder d = solve_stepup(model, alpha);
      const std::array<Procedure, 2> procs{Procedure::from_ladder(f), Procedure::from_ladder(d)};
      for (int j = 1; j <= k; ++j) {
        for (double eps : {0.5, 1.0, 2.0}) {
          const ThetaVector theta = lfc_theta(k, j, eps);
          const std::array<double, 2> beta{beta_stepdown(f, k, j, eps), beta_stepup(d, k, j, eps)};
          const std::uint64_t seed = options.seed + 1000 * k + 10 * j + static_cast<int>(eps * 2);
          for (int p = 0; p < 2; ++p) {
            const SimulationReport r =
                estimate_reject_at_least(model, theta, procs[p], j, reps, seed);
            worst = std::max(worst, band_ratio(r, beta[p]));
            t.expect(agrees(r, beta[p]),
                     fmt("%s k=%d j=%d eps=%g: analytic %.6f, simulated %.6f +- %.6f",
                         procs[p].id.c_str(), k, j, eps, beta[p], r.estimate, r.half_width));
          }
          // Per-replicate: every rejection at w_{k,j} is of a false hypothesis.
          std::vector<double> x(k);
          std::vector<std::uint8_t> mask(k);
          std::vector<std::size_t> scratch;
          std::size_t mismatches = 0;
          const std::size_t per_rep = std::min<std::size_t>(reps, 100'000);
          for (std::size_t r = 0; r < per_rep; ++r) {
            sample_replicate(model, theta, seed, r, x);
            for (const Procedure& proc : procs) {
              const std::size_t all = proc.reject(x, mask, scratch);
              std::size_t false_ones = 0;
              for (int i = 0; i < k; ++i) false_ones += mask[i] && theta[i] > 0.0;
              mismatches += all != false_ones;
            }
          }
          t.expect(mismatches == 0, fmt("k=%d j=%d eps=%g: %zu replicates reject a true null",
                                        k, j, eps, mismatches));
        }
      }
    }
    t.note(fmt("%zu reps, largest |simulated - analytic| = %.2f half-widths", reps, worst));
  });
}

CheckResult check_pair_tradeoff(const Options& options) {
  return timed(6, "pair criterion trade-off", [&](Tally& t) {
    const std::size_t reps = simulation_reps(options.level);
    const ModelSpec model = ModelSpec::iid_normal(2);
    struct Fixture {
      double alpha, eps;
    };
    int index = 0;
    for (const Fixture fx : {Fixture{0.05, 1.0}, Fixture{0.05, 2.0}, Fixture{0.1, 1.5}}) {
      const PairConstants c = solve_pair_constants(model, fx.alpha, {fx.eps, fx.eps});
      const PairCriteria sd = pair_criteria(c, PairVariant::StepdownOpt);
      const PairCriteria su = pair_criteria(c, PairVariant::StepupOpt);
      const std::string name = fmt("alpha=%g eps=%g", fx.alpha, fx.eps);
      t.expect(sd.crit_a1 > su.crit_a1,
               fmt("%s: A1 stepdown %.8f vs stepup %.8f", name.c_str(), sd.crit_a1, su.crit_a1));
      t.expect(sd.crit_a2 < su.crit_a2,
               fmt("%s: A2 stepdown %.8f vs stepup %.8f", name.c_str(), sd.crit_a2, su.crit_a2));
      const ThetaVector a1_theta({fx.eps, -kInf});
      const ThetaVector a2_theta({fx.eps, fx.eps});
      for (PairVariant v : {PairVariant::StepdownOpt, PairVariant::StepupOpt}) {
        const std::uint64_t seed = options.seed + 60 + index++;
        std::size_t any = 0, both = 0;
        std::vector<double> x(2);
        for (std::size_t r = 0; r < reps; ++r) {
          sample_replicate(model, a1_theta, seed, r, x);
          any += pair_classify(x[0], x[1], c, v) != PairRegion::D00;
          sample_replicate(model, a2_theta, seed + 1000, r, x);
          both += pair_classify(x[0], x[1], c, v) == PairRegion::D11;
        }
        const PairCriteria& want = v == PairVariant::StepdownOpt ? sd : su;
        const char* vname = v == PairVariant::StepdownOpt ? "stepdown-opt" : "stepup-opt";
        const SimulationTarget target{Metric::RejectAtLeast, vname, a1_theta, model, fx.alpha, 1};
        const auto r1 = SimulationReport::from_count(any, reps, seed, target);
        const auto r2 = SimulationReport::from_count(both, reps, seed + 1000, target);
        t.expect(agrees(r1, want.crit_a1), fmt("%s %s A1: analytic %.6f, simulated %.6f +- %.6f",
                                              name.c_str(), vname, want.crit_a1, r1.estimate,
                                              r1.half_width));
        t.expect(agrees(r2, want.crit_a2), fmt("%s %s A2: analytic %.6f, simulated %.6f +- %.6f",
                                              name.c_str(), vname, want.crit_a2, r2.estimate,
                                              r2.half_width));
      }
    }
  });
}

CheckResult check_monotone_rules(const Options& options) {
  return timed(7, "monotone-rule property", [&](Tally& t) {
    const double alpha = 0.05;
    const std::size_t trials = 10'000;
    SplitMix64 g = replicate_engine(options.seed, 7);
    std::normal_distribution<double> noise;
    std::size_t total_trials = 0;
    auto run = [&](const std::string& name, const DecisionRule& rule, int k) {
      for (int base = 0; base < 4; ++base) {
        std::vector<double> x(k);
        for (double& v : x) v = 4.0 * uniform01(g) + noise(g);
        const MonotoneReport rep = check_monotone(rule, x, trials, options.seed + base);
        total_trials += rep.trials;
        t.expect(rep.ok(), fmt("%s: %zu violations of %zu trials", name.c_str(),
                               rep.violations.size(), rep.trials));
      }
    };
    const std::vector<ModelSpec> models{ModelSpec::iid_normal(2), ModelSpec::iid_normal(3),
                                        ModelSpec::iid_normal(5),
                                        ModelSpec::equicorr_normal(5, 0.5)};
    for (const ModelSpec& model : models) {
      const ConstantLadder f = solve_stepdown(model, alpha);
      const ConstantLadder d = solve_stepup(model, alpha);
      const std::string name = model.describe();
      run(name + " stepdown", [&](std::span<const double> x) { return stepdown_decide(x, f); },
          model.k());
      run(name + " stepup", [&](std::span<const double> x) { return stepup_decide(x, d); },
          model.k());
      run(name + " holm",
          [&](std::span<const double> x) {
            std::vector<double> p(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) p[i] = marginal_sf(model, 0.0, x[i]);
            return holm_bonferroni(p, alpha);
          },
          model.k());
    }
    const ModelSpec pair_model = ModelSpec::iid_normal(2);
    const PairConstants c = solve_pair_constants(pair_model, alpha, {1.0, 1.0});
    for (PairVariant v : {PairVariant::StepdownOpt, PairVariant::StepupOpt}) {
      run(v == PairVariant::StepdownOpt ? "pair stepdown-opt" : "pair stepup-opt",
          [&](std::span<const double> x) { return pair_decision(pair_classify(x[0], x[1], c, v)); },
          2);
    }

    // Negative control: the stepdown-optimal pair rule with an isolated
    // reject-both box below b. Raising either statistic leaves the box.
    const double lo = c.b[0] - 1.0, hi = c.b[0] - 0.8;
    DecisionRule island = [&](std::span<const double> x) {
      if (x[0] > lo && x[0] < hi && x[1] > lo && x[1] < hi) return pair_decision(PairRegion::D11);
      return pair_decision(pair_classify(x[0], x[1], c, PairVariant::StepdownOpt));
    };
    const std::vector<double> inside{lo + 0.1, lo + 0.1};
    const MonotoneReport neg = check_monotone(island, inside, trials, options.seed);
    t.expect(!neg.ok(), "non-monotone negative control produced no violation");

    // A decreasing stepup ladder is not a counterexample: the rule it induces
    // still satisfies the definition, so it must also come out clean.
    const std::vector<double> decreasing{2.5, 1.0, 0.5};
    std::size_t dec_violations = 0;
    for (int base = 0; base < 4; ++base) {
      std::vector<double> x(3);
      for (double& v : x) v = 3.0 * uniform01(g) + noise(g);
      dec_violations += check_monotone(
                            [&](std::span<const double> y) {
                              return detail::stepup_decide_unchecked(y, decreasing);
                            },
                            x, trials, options.seed + 70 + base)
                            .violations.size();
    }
    t.note(fmt("%zu trials on monotone rules; negative control %zu violations; decreasing "
               "stepup ladder %zu violations",
               total_trials, neg.violations.size(), dec_violations));
  });
}

CheckResult check_grid_oracle(const Options& options) {
  if (options.level == Level::Fast) {
    return {8, "grid maximin oracle", true, true, "runs at the slow level", 0.0};
  }
  return timed(8, "grid maximin oracle", [](Tally& t) {
    using namespace grid;
    auto within_cell = [](const ThresholdRule& r, const std::vector<ThresholdRule>& opts) {
      for (const auto& o : opts) {
        int dist = 0;
        for (int i = 0; i < 2; ++i) {
          dist = std::max({dist, std::abs(r.a[i] - o.a[i]), std::abs(r.b[i] - o.b[i])});
        }
        if (dist <= 1) return true;
      }
      return false;
    };
    struct Fixture {
      double shift, alpha, lo, hi;
    };
    for (const Fixture fx : {Fixture{1.0, 0.1, -0.5, 2.5}, Fixture{1.5, 0.2, -0.5, 2.5},
                             Fixture{2.0, 0.1, -1.0, 3.0}, Fixture{2.5, 0.05, -0.5, 3.5}}) {
      const GridModel model = GridModel::discretized_normal(8, fx.shift, fx.lo, fx.hi);
      const ThresholdRule disc = discretized_continuous_rule(model, fx.alpha);
      const GridRule disc_rule = to_grid_rule(disc, model.m);
      const std::string name = fmt("shift=%g alpha=%g", fx.shift, fx.alpha);
      t.expect(max_fwer_grid(disc_rule, model) <= fx.alpha + 1e-12,
               fmt("%s: discretized rule exceeds alpha", name.c_str()));
      t.expect(is_monotone_rule(disc_rule), fmt("%s: discretized rule not monotone", name.c_str()));
      const MaximinResult a1 = brute_force_maximin(model, fx.alpha, GridCriterion::A1);
      const double v1 = criterion_value(disc_rule, model, GridCriterion::A1);
      t.expect(std::abs(v1 - a1.value) <= 1e-12 && within_cell(disc, a1.maximizers),
               fmt("%s A1: oracle %.10f, discretized %.10f", name.c_str(), a1.value, v1));
      const MaximinResult a2 = brute_force_maximin(model, fx.alpha, GridCriterion::A2, disc.a);
      const double v2 = criterion_value(disc_rule, model, GridCriterion::A2);
      t.expect(std::abs(v2 - a2.value) <= 1e-12 && within_cell(disc, a2.maximizers),
               fmt("%s A2: oracle %.10f, discretized %.10f", name.c_str(), a2.value, v2));
    }

    // 3x3: every monotone rule against the threshold family.
    const std::vector<std::pair<GridModel, double>> small{
        {GridModel::make({0.7, 0.2, 0.1}, {0.2, 0.3, 0.5}), 0.31},
        {GridModel::make({0.6, 0.3, 0.1}, {0.1, 0.3, 0.6}), 0.25},
        {GridModel::make({0.5, 0.3, 0.2}, {0.1, 0.2, 0.7}), 0.4}};
    for (std::size_t s = 0; s < small.size(); ++s) {
      const auto& [model, alpha] = small[s];
      const MaximinResult a1 = brute_force_maximin(model, alpha, GridCriterion::A1);
      const MonotoneSearchResult e1 = enumerate_monotone_rules(model, alpha, GridCriterion::A1);
      t.expect(std::abs(e1.value - a1.value) <= 1e-12,
               fmt("3x3 fixture %zu A1: all monotone rules %.10f, threshold family %.10f", s,
                   e1.value, a1.value));
      const ThresholdRule disc = discretized_continuous_rule(model, alpha);
      const GridRule disc_rule = to_grid_rule(disc, model.m);
      std::vector<std::uint8_t> accept_none(disc_rule.labels.size());
      for (std::size_t c = 0; c < accept_none.size(); ++c) accept_none[c] = disc_rule.labels[c] == 0;
      const MaximinResult a2 = brute_force_maximin(model, alpha, GridCriterion::A2, disc.a);
      const MonotoneSearchResult e2 =
          enumerate_monotone_rules(model, alpha, GridCriterion::A2, accept_none);
      t.expect(std::abs(e2.value - a2.value) <= 1e-12,
               fmt("3x3 fixture %zu A2: all monotone rules %.10f, threshold family %.10f", s,
                   e2.value, a2.value));
    }
  });
}

CheckResult check_slice_identities(const Options& options) {
  return timed(9, "slice identities", [&](Tally& t) {
    using namespace grid;
    SplitMix64 g = replicate_engine(options.seed, 9);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const int m = 2 + static_cast<int>(uniform01(g) * 5);
      const int orthants = 1 + static_cast<int>(uniform01(g) * 4);
      const GridRegion region = random_monotone_region(m, 3, orthants, g());
      std::vector<std::vector<double>> pmfs(3, std::vector<double>(m));
      for (int a = 0; a < 2; ++a) {
        double sum = 0.0;
        for (double& p : pmfs[a]) sum += (p = 0.05 + uniform01(g));
        for (double& p : pmfs[a]) p /= sum;
      }
      const GridRegion u = slice_union(region, 2);
      const GridRegion i = slice_intersection(region, 2);
      t.expect(is_monotone(u) && is_monotone(i), fmt("region %d: slice not monotone", n));
      const std::span<const std::vector<double>> lower(pmfs.data(), 2);
      pmfs[2] = point_mass(m, m);
      const double top = region_probability(region, pmfs);
      pmfs[2] = point_mass(m, 1);
      const double bottom = region_probability(region, pmfs);
      const double pu = region_probability(u, lower);
      const double pi = region_probability(i, lower);
      worst = std::max({worst, std::abs(top - pu), std::abs(bottom - pi)});
      t.expect(std::abs(top - pu) <= 1e-12,
               fmt("region %d: P(R | top) = %.17g, P(U(R)) = %.17g", n, top, pu));
      t.expect(std::abs(bottom - pi) <= 1e-12,
               fmt("region %d: P(R | bottom) = %.17g, P(I(R)) = %.17g", n, bottom, pi));
      // Two coordinates at the top: U applied twice.
      const GridRegion uu = slice_union(u, 1);
      const std::span<const std::vector<double>> first(pmfs.data(), 1);
      std::vector<std::vector<double>> tt{pmfs[0], point_mass(m, m), point_mass(m, m)};
      const double top2 = region_probability(region, tt);
      const double puu = region_probability(uu, first);
      t.expect(std::abs(top2 - puu) <= 1e-12,
               fmt("region %d: P(R | top, top) = %.17g, P(U(U(R))) = %.17g", n, top2, puu));
    }
    t.note(fmt("largest discrepancy %.2e", worst));
  });
}

CheckResult check_dominance(const Options& options) {
  return timed(10, "procedure dominance", [&](Tally& t) {
    const double alpha = 0.05;
    const std::size_t reps = 100'000;
    for (int k : {2, 4, 8}) {
      const ModelSpec model = ModelSpec::iid_normal(k);
      const ConstantLadder f = solve_stepdown(model, alpha);
      const ConstantLadder d = solve_stepup(model, alpha);
      SplitMix64 g = replicate_engine(options.seed, 10 + k);
      std::normal_distribution<double> noise;
      std::vector<double> x(k), p(k);
      std::vector<std::size_t> scratch;
      std::size_t superset_failures = 0, count_failures = 0;
      std::string example;
      for (std::size_t r = 0; r < reps; ++r) {
        for (int i = 0; i < k; ++i) {
          x[i] = 4.0 * uniform01(g) - 1.0 + noise(g);
          p[i] = marginal_sf(model, 0.0, x[i]);
        }
        const Decision sd = stepdown_decide(x, f);
        const Decision holm = holm_bonferroni(p, alpha);
        bool superset = true;
        for (int i = 0; i < k; ++i) superset = superset && (sd.is_rejected(i) || !holm.is_rejected(i));
        superset_failures += !superset;
        const std::size_t up = detail::stepup_count(x, d.values, scratch);
        if (up < sd.rejected_count()) {
          if (count_failures == 0) {
            example = fmt("k=%d replicate %zu: stepup %zu < stepdown %zu at x = (", k, r, up,
                          sd.rejected_count());
            for (int i = 0; i < k; ++i) example += fmt(i ? ", %.4f" : "%.4f", x[i]);
            example += ")";
          }
          ++count_failures;
        }
      }
      t.expect(superset_failures == 0,
               fmt("k=%d: stepdown misses a Holm rejection in %zu of %zu replicates", k,
                   superset_failures, reps));
      t.expect(count_failures == 0,
               fmt("k=%d: stepup rejects fewer than stepdown in %zu of %zu replicates; first %s",
                   k, count_failures, reps, example.c_str()));
    }
  });
}

CheckResult check_supplied_ladder(const ConstantLadder& ladder) {
  return timed(0, "supplied constants: defining-equation residual", [&](Tally& t) {
    for (int j = 1; j <= ladder.k(); ++j) {
      const double r = ladder_residual(ladder, j);
      t.expect(std::abs(r) <= kResidualTolerance,
               fmt("%s %s: residual of value %d (%.15g) is %.3g",
                   std::string(ladder_kind_name(ladder.kind)).c_str(),
                   ladder.model.describe().c_str(), j, ladder.values[j - 1], r));
    }
    for (int j = 2; j <= ladder.k(); ++j) {
      t.expect(ladder.values[j - 1] >= ladder.values[j - 2],
               fmt("ladder decreases at value %d", j));
    }
  });
}

std::vector<CheckResult> run_suite(const Options& options) {
  std::vector<CheckResult> out;
  out.push_back(check_closed_form_constants(options));
  out.push_back(check_ladder_identities(options));
  out.push_back(check_pair_ordering(options));
  out.push_back(check_lfc_fwer(options));
  out.push_back(check_power_formulas(options));
  out.push_back(check_pair_tradeoff(options));
  out.push_back(check_monotone_rules(options));
  out.push_back(check_grid_oracle(options));
  out.push_back(check_slice_identities(options));
  out.push_back(check_dominance(options));
  for (const ConstantLadder& ladder : options.supplied) out.push_back(check_supplied_ladder(ladder));
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace stepwise::verify
