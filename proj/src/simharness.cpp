#include "stepwise/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "stepwise/error.hpp"
#include "stepwise/procedures.hpp"

namespace stepwise {

std::string_view procedure_kind_name(ProcedureKind kind) {
  switch (kind) {
    case ProcedureKind::Stepdown:
      return "stepdown";
    case ProcedureKind::Stepup:
      return "stepup";
    case ProcedureKind::Holm:
      return "holm";
  }
  return "?";
}

ProcedureKind parse_procedure_kind(std::string_view name) {
  if (name == "stepdown") return ProcedureKind::Stepdown;
  if (name == "stepup") return ProcedureKind::Stepup;
  if (name == "holm") return ProcedureKind::Holm;
  throw InvalidArgument("unknown procedure '" + std::string(name) + "'");
}

Procedure Procedure::from_ladder(const ConstantLadder& ladder) {
  const ProcedureKind kind =
      ladder.kind == LadderKind::Stepdown ? ProcedureKind::Stepdown : ProcedureKind::Stepup;
  return {kind, std::string(procedure_kind_name(kind)), ladder.alpha, ladder.values};
}

Procedure Procedure::holm(const ModelSpec& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  std::vector<double> h(model.k());
  for (int j = 1; j <= model.k(); ++j) h[j - 1] = marginal_upper_quantile(model, 0.0, alpha / j);
  return {ProcedureKind::Holm, "holm", alpha, std::move(h)};
}

Procedure Procedure::make(ProcedureKind kind, const ModelSpec& model, double alpha) {
  switch (kind) {
    case ProcedureKind::Stepdown:
      return from_ladder(solve_stepdown(model, alpha));
    case ProcedureKind::Stepup:
      return from_ladder(solve_stepup(model, alpha));
    case ProcedureKind::Holm:
      return holm(model, alpha);
  }
  throw InvalidArgument("unknown procedure kind");
}

std::size_t Procedure::reject(std::span<const double> x, std::span<std::uint8_t> mask,
                              std::vector<std::size_t>& scratch) const {
  std::fill(mask.begin(), mask.end(), std::uint8_t{0});
  if (kind == ProcedureKind::Stepup) {
    const std::size_t n = detail::stepup_count(x, thresholds, scratch);
    for (std::size_t m = x.size() - n; m < x.size(); ++m) mask[scratch[m]] = 1;
    return n;
  }
  const std::size_t n = detail::stepdown_count(x, thresholds, scratch);
  for (std::size_t m = 0; m < n; ++m) mask[scratch[m]] = 1;
  return n;
}

SimulationReport SimulationReport::from_count(std::size_t hits, std::size_t reps,
                                              std::uint64_t seed, SimulationTarget target) {
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  return {p, 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps)), reps, seed,
          std::move(target)};
}

namespace {

std::atomic<unsigned> g_threads{0};

// Splits [0, reps) into contiguous chunks, one per worker. Each worker fills
// its own integer counters; the sum is independent of the split.
template <class Body>
std::vector<std::size_t> run_replicates(std::size_t reps, std::size_t counters, Body body) {
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(reps / 20'000, 1, simulation_threads()));
  std::vector<std::vector<std::size_t>> partial(workers, std::vector<std::size_t>(counters, 0));
  auto work = [&](unsigned w) {
    const std::size_t begin = reps * w / workers;
    const std::size_t end = reps * (w + 1) / workers;
    body(begin, end, partial[w]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  std::vector<std::size_t> total(counters, 0);
  for (const auto& p : partial) {
    for (std::size_t c = 0; c < counters; ++c) total[c] += p[c];
  }
  return total;
}

void check_theta(const ModelSpec& model, const ThetaVector& theta, const Procedure& procedure) {
  if (theta.size() != static_cast<std::size_t>(model.k())) {
    throw InvalidArgument("theta length differs from model k");
  }
  if (procedure.k() != model.k()) throw InvalidArgument("procedure size differs from model k");
  for (double t : theta.values()) detail::require_shift_support(model, t);
}

}  // namespace

unsigned simulation_threads() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_simulation_threads(unsigned n) { g_threads.store(n); }

SimulationReport estimate_fwer(const ModelSpec& model, const ThetaVector& theta,
                               const Procedure& procedure, std::size_t reps, std::uint64_t seed) {
  check_theta(model, theta, procedure);
  if (reps < kMinFwerReps) throw InvalidArgument("estimate_fwer needs at least 10^4 replicates");
  const std::size_t k = theta.size();
  std::vector<std::uint8_t> true_null(k);
  bool any_true = false;
  for (std::size_t i = 0; i < k; ++i) {
    true_null[i] = theta[i] <= 0.0;
    any_true = any_true || true_null[i];
  }
  if (!any_true) throw InvalidArgument("FWER is undefined: theta has no true null hypothesis");
  const auto counts = run_replicates(reps, 1, [&](std::size_t begin, std::size_t end, auto& acc) {
    std::vector<double> x(k);
    std::vector<std::uint8_t> mask(k);
    std::vector<std::size_t> scratch;
    for (std::size_t r = begin; r < end; ++r) {
      sample_replicate(model, theta, seed, r, x);
      procedure.reject(x, mask, scratch);
      for (std::size_t i = 0; i < k; ++i) {
        if (mask[i] && true_null[i]) {
          ++acc[0];
          break;
        }
      }
    }
  });
  return SimulationReport::from_count(
      counts[0], reps, seed, {Metric::Fwer, procedure.id, theta, model, procedure.alpha});
}

SimulationReport estimate_reject_at_least(const ModelSpec& model, const ThetaVector& theta,
                                          const Procedure& procedure, int j, std::size_t reps,
                                          std::uint64_t seed, bool false_only) {
  check_theta(model, theta, procedure);
  if (j < 0 || j > model.k()) throw InvalidArgument("j out of range [0, k]");
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  SimulationTarget target{Metric::RejectAtLeast, procedure.id, theta, model, procedure.alpha, j,
                          false_only};
  if (j == 0) return SimulationReport::from_count(reps, reps, seed, std::move(target));
  const std::size_t k = theta.size();
  const auto counts = run_replicates(reps, 1, [&](std::size_t begin, std::size_t end, auto& acc) {
    std::vector<double> x(k);
    std::vector<std::uint8_t> mask(k);
    std::vector<std::size_t> scratch;
    for (std::size_t r = begin; r < end; ++r) {
      sample_replicate(model, theta, seed, r, x);
      std::size_t n = procedure.reject(x, mask, scratch);
      if (false_only) {
        n = 0;
        for (std::size_t i = 0; i < k; ++i) n += mask[i] && theta[i] > 0.0;
      }
      if (n >= static_cast<std::size_t>(j)) ++acc[0];
    }
  });
  return SimulationReport::from_count(counts[0], reps, seed, std::move(target));
}

ComparisonTable compare_procedures(const ModelSpec& model, const std::vector<ThetaVector>& theta_grid,
                                   const std::vector<Procedure>& procedures, std::size_t reps,
                                   std::uint64_t seed) {
  if (procedures.size() < 2) throw InvalidArgument("compare_procedures needs >= 2 procedures");
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  const std::size_t np = procedures.size();
  const std::size_t k = static_cast<std::size_t>(model.k());
  ComparisonTable table{reps, seed, {}, {}};
  for (const auto& p : procedures) table.procedures.push_back(p.id);

  // Counter layout per procedure p: [fwer, reject>=1..k, total rejections],
  // then np*np count shortfalls, then np*np subset failures.
  const std::size_t stride = k + 2;
  const std::size_t shortfall_base = np * stride;
  const std::size_t subset_base = shortfall_base + np * np;
  const std::size_t ncounters = subset_base + np * np;

  for (const ThetaVector& theta : theta_grid) {
    for (const auto& p : procedures) check_theta(model, theta, p);
    std::vector<std::uint8_t> true_null(k);
    bool any_true = false;
    for (std::size_t i = 0; i < k; ++i) {
      true_null[i] = theta[i] <= 0.0;
      any_true = any_true || true_null[i];
    }
    const auto c = run_replicates(reps, ncounters, [&](std::size_t begin, std::size_t end,
                                                       auto& acc) {
      std::vector<double> x(k);
      std::vector<std::vector<std::uint8_t>> masks(np, std::vector<std::uint8_t>(k));
      std::vector<std::size_t> counts(np);
      std::vector<std::size_t> scratch;
      for (std::size_t r = begin; r < end; ++r) {
        sample_replicate(model, theta, seed, r, x);
        for (std::size_t p = 0; p < np; ++p) {
          counts[p] = procedures[p].reject(x, masks[p], scratch);
          bool type1 = false;
          for (std::size_t i = 0; i < k; ++i) type1 = type1 || (masks[p][i] && true_null[i]);
          acc[p * stride] += type1;
          for (std::size_t j = 1; j <= counts[p]; ++j) ++acc[p * stride + j];
          acc[p * stride + k + 1] += counts[p];
        }
        for (std::size_t a = 0; a < np; ++a) {
          for (std::size_t b = 0; b < np; ++b) {
            acc[shortfall_base + a * np + b] += counts[a] < counts[b];
            bool contains = true;
            for (std::size_t i = 0; i < k; ++i) contains = contains && (masks[a][i] || !masks[b][i]);
            acc[subset_base + a * np + b] += !contains;
          }
        }
      }
    });
    ComparisonRow row;
    row.theta = theta;
    const double n = static_cast<double>(reps);
    for (std::size_t p = 0; p < np; ++p) {
      ProcedureMetrics m;
      m.id = procedures[p].id;
      if (any_true) m.fwer = c[p * stride] / n;
      for (std::size_t j = 1; j <= k; ++j) m.reject_at_least.push_back(c[p * stride + j] / n);
      m.mean_rejections = c[p * stride + k + 1] / n;
      row.metrics.push_back(std::move(m));
    }
    row.count_shortfalls.assign(np, std::vector<std::size_t>(np));
    row.subset_failures.assign(np, std::vector<std::size_t>(np));
    for (std::size_t a = 0; a < np; ++a) {
      for (std::size_t b = 0; b < np; ++b) {
        row.count_shortfalls[a][b] = c[shortfall_base + a * np + b];
        row.subset_failures[a][b] = c[subset_base + a * np + b];
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace stepwise
