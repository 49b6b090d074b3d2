#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "documents.hpp"
#include "stepwise/error.hpp"
#include "stepwise/normal.hpp"
#include "stepwise/verify.hpp"

namespace stepwise::cli {
namespace {

struct ModelArgs {
  std::string family = "iid-normal";
  double rho = 0.0;
  double alpha = 0.05;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--family", m.family, "iid-normal, equicorr-normal or iid-uniform")
      ->capture_default_str();
  cmd->add_option("--rho", m.rho, "common correlation for equicorr-normal")->capture_default_str();
  cmd->add_option("--alpha", m.alpha, "familywise level")->capture_default_str();
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

ModelSpec build_model(const ModelArgs& m, int k) {
  check_alpha(m.alpha);
  const Family family = parse_family(m.family);
  if (family != Family::EquicorrNormal && m.rho != 0.0) {
    throw InvalidArgument("--rho applies only to equicorr-normal");
  }
  return ModelSpec::make(family, k, m.rho);
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << doc.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::optional<std::filesystem::path> cache_path(LadderKind kind, const ModelSpec& model,
                                                double alpha) {
  const char* dir = std::getenv("STEPWISE_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  std::ostringstream name;
  name.precision(17);
  name << ladder_kind_name(kind) << "-" << family_name(model.family()) << "-rho" << model.rho()
       << "-k" << model.k() << "-alpha" << alpha << ".json";
  return std::filesystem::path(dir) / name.str();
}

ConstantLadder load_or_solve(LadderKind kind, const ModelSpec& model, double alpha,
                             bool use_cache) {
  const auto path = use_cache ? cache_path(kind, model, alpha) : std::nullopt;
  if (path && std::filesystem::exists(*path)) {
    std::ifstream f(*path);
    try {
      const json doc = json::parse(f);
      if (ladder_document_matches(doc, kind, model, alpha)) return ladder_from_json(doc);
    } catch (const std::exception&) {
      // unreadable cache entries are recomputed and overwritten
    }
  }
  ConstantLadder ladder = solve_ladder(kind, model, alpha);
  if (path) {
    std::error_code ec;
    std::filesystem::create_directories(path->parent_path(), ec);
    std::ofstream f(*path);
    if (f) f << ladder_to_json(ladder).dump(2) << "\n";
  }
  return ladder;
}

// Processing order of the stepwise rules: descending statistics for the
// stepdown rules, ascending for stepup and ascending p-values for Holm.
std::vector<std::size_t> processing_order(std::span<const double> v, bool descending) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? v[a] > v[b] : v[a] < v[b];
  });
  return order;
}

json trace_to_json(const Decision& d, const std::vector<CsvRow>& rows) {
  json out = json::array();
  for (const TraceStep& s : d.trace) {
    out.push_back({{"step", s.step},
                   {"id", rows[s.hypothesis].id},
                   {"statistic", encode_number(s.statistic)},
                   {"threshold", encode_number(s.threshold)},
                   {"passed", s.passed}});
  }
  return out;
}

struct DecideArgs {
  ModelArgs model;
  std::string procedure = "stepdown";
  std::string input;
  std::string input_kind = "statistics";
  std::string output;
  bool no_cache = false;
};

int cmd_decide(const DecideArgs& a, std::ostream& out) {
  const ProcedureKind kind = parse_procedure_kind(a.procedure);
  if (a.input_kind != "statistics" && a.input_kind != "p-values") {
    throw InvalidArgument("--input-kind must be statistics or p-values");
  }
  const bool p_input = a.input_kind == "p-values";
  if (p_input && a.model.family != "iid-normal") {
    throw InvalidArgument("p-value input is mapped onto the iid-normal scale; drop --family");
  }
  std::ifstream f(a.input);
  if (!f) throw DataError("cannot read " + a.input);
  const std::vector<CsvRow> rows = parse_csv(f);
  const int k = static_cast<int>(rows.size());
  const ModelSpec model = build_model(a.model, k);

  std::vector<double> x(k), p(k);
  for (int i = 0; i < k; ++i) {
    const double v = rows[i].value;
    if (p_input) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("p-value of " + rows[i].id + " lies outside [0, 1]");
      }
      p[i] = v;
      x[i] = normal::quantile(1.0 - v);
    } else {
      x[i] = v;
      p[i] = marginal_sf(model, 0.0, v);
    }
  }

  Decision decision;
  json constants;
  std::vector<std::size_t> order;
  std::vector<double> step_thresholds(k);
  if (kind == ProcedureKind::Holm) {
    decision = holm_bonferroni(p, a.model.alpha);
    order = processing_order(p, false);
    for (int i = 0; i < k; ++i) step_thresholds[i] = a.model.alpha / (k - i);
    constants = {{"kind", "holm"}, {"alpha", a.model.alpha}, {"scale", "p-value"},
                 {"thresholds", step_thresholds}};
  } else {
    const LadderKind lk = kind == ProcedureKind::Stepdown ? LadderKind::Stepdown : LadderKind::Stepup;
    const ConstantLadder ladder = load_or_solve(lk, model, a.model.alpha, !a.no_cache);
    if (lk == LadderKind::Stepdown) {
      decision = stepdown_decide(x, ladder);
      order = processing_order(x, true);
      for (int i = 0; i < k; ++i) step_thresholds[i] = ladder.step_threshold(i + 1);
    } else {
      decision = stepup_decide(x, ladder);
      order = processing_order(x, false);
      step_thresholds = ladder.values;
    }
    constants = ladder_to_json(ladder);
  }

  json verdicts = json::array();
  std::vector<int> step_of(k);
  for (int s = 0; s < k; ++s) step_of[order[s]] = s + 1;
  for (int i = 0; i < k; ++i) {
    verdicts.push_back({{"id", rows[i].id},
                        {"verdict", decision.is_rejected(i) ? "reject" : "accept"},
                        {"step", step_of[i]},
                        {"statistic", encode_number(x[i])},
                        {"threshold", encode_number(step_thresholds[step_of[i] - 1])}});
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"verdicts", std::move(verdicts)},
              {"trace", trace_to_json(decision, rows)},
              {"constants", std::move(constants)},
              {"metadata",
               {{"procedure", procedure_kind_name(kind)},
                {"alpha", a.model.alpha},
                {"model", model_to_json(model)},
                {"input_kind", a.input_kind},
                {"transform", p_input ? "x = normal quantile of 1 - p" : "none"},
                {"rejected", decision.rejected_count()}}}};
  emit(doc, a.output, out);
  return kOk;
}

struct SimulateArgs {
  ModelArgs model;
  std::string procedure = "stepdown";
  std::string theta;
  std::optional<int> k;
  std::string metric = "fwer";
  int j = 1;
  bool false_only = false;
  std::size_t reps = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output;
  bool no_cache = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const ThetaVector theta = parse_theta(a.theta, a.k);
  const ModelSpec model = build_model(a.model, static_cast<int>(theta.size()));
  const ProcedureKind kind = parse_procedure_kind(a.procedure);
  Procedure proc = kind == ProcedureKind::Holm
                       ? Procedure::holm(model, a.model.alpha)
                       : Procedure::from_ladder(load_or_solve(
                             kind == ProcedureKind::Stepdown ? LadderKind::Stepdown
                                                             : LadderKind::Stepup,
                             model, a.model.alpha, !a.no_cache));
  if (a.threads > 0) set_simulation_threads(a.threads);
  SimulationReport report = [&] {
    if (a.metric == "fwer") return estimate_fwer(model, theta, proc, a.reps, a.seed);
    if (a.metric == "reject-ge") {
      return estimate_reject_at_least(model, theta, proc, a.j, a.reps, a.seed, a.false_only);
    }
    throw InvalidArgument("--metric must be fwer or reject-ge");
  }();
  emit(report_to_json(report), a.output, out);
  return kOk;
}

struct ConstantsArgs {
  ModelArgs model;
  std::string kind = "stepdown";
  int k = 0;
  std::string output;
  bool no_cache = false;
};

int cmd_constants(const ConstantsArgs& a, std::ostream& out) {
  const LadderKind kind = parse_ladder_kind(a.kind);
  const ModelSpec model = build_model(a.model, a.k);
  emit(ladder_to_json(load_or_solve(kind, model, a.model.alpha, !a.no_cache)), a.output, out);
  return kOk;
}

struct VerifyArgs {
  std::string level = "fast";
  std::uint64_t seed = verify::Options{}.seed;
  std::vector<std::string> constants;
  bool supplied_only = false;
  std::string output;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  verify::Options options;
  options.level = verify::parse_level(a.level);
  options.seed = a.seed;
  for (const auto& path : a.constants) options.supplied.push_back(ladder_from_json(read_json_file(path)));
  std::vector<verify::CheckResult> results;
  if (a.supplied_only) {
    if (options.supplied.empty()) throw InvalidArgument("--supplied-only needs --constants");
    for (const auto& ladder : options.supplied) results.push_back(verify::check_supplied_ladder(ladder));
  } else {
    results = verify::run_suite(options);
  }
  json checks = json::array();
  for (const auto& r : results) {
    const char* status = r.skipped ? "SKIP" : r.passed ? "PASS" : "FAIL";
    out << status << "  [" << r.criterion << "] " << r.name << " (" << std::fixed
        << std::setprecision(2) << r.seconds << " s): " << r.detail << "\n";
    checks.push_back({{"criterion", r.criterion}, {"name", r.name}, {"passed", r.passed},
                      {"skipped", r.skipped}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  const bool ok = verify::all_passed(results);
  out << (ok ? "all checks passed" : "verification FAILED") << "\n";
  if (!a.output.empty()) {
    emit({{"schema_version", kSchemaVersion},
          {"level", a.level},
          {"seed", a.seed},
          {"passed", ok},
          {"checks", std::move(checks)}},
         a.output, out);
  }
  return ok ? kOk : kVerifyFailed;
}

struct GridArgs {
  std::string fixture;
  std::string criterion = "A1";
  std::string output;
};

json threshold_rule_json(const grid::ThresholdRule& r) { return {{"a", r.a}, {"b", r.b}}; }

int cmd_grid(const GridArgs& a, std::ostream& out) {
  if (a.criterion != "A1" && a.criterion != "A2") throw InvalidArgument("--criterion must be A1 or A2");
  const GridFixture fx = grid_fixture_from_json(read_json_file(a.fixture));
  const auto crit = a.criterion == "A1" ? grid::GridCriterion::A1 : grid::GridCriterion::A2;
  const grid::ThresholdRule disc = grid::discretized_continuous_rule(fx.model, fx.alpha);
  const grid::GridRule disc_rule = grid::to_grid_rule(disc, fx.model.m);
  const auto fixed = crit == grid::GridCriterion::A2 ? std::optional(disc.a) : std::nullopt;
  const grid::MaximinResult best = grid::brute_force_maximin(fx.model, fx.alpha, crit, fixed);
  json maximizers = json::array();
  for (const auto& r : best.maximizers) maximizers.push_back(threshold_rule_json(r));
  json doc = {{"schema_version", kSchemaVersion},
              {"m", fx.model.m},
              {"alpha", fx.alpha},
              {"criterion", a.criterion},
              {"value", best.value},
              {"feasible_rules", best.feasible},
              {"maximizers", std::move(maximizers)},
              {"discretized",
               {{"rule", threshold_rule_json(disc)},
                {"value", grid::criterion_value(disc_rule, fx.model, crit)},
                {"max_fwer", grid::max_fwer_grid(disc_rule, fx.model)}}}};
  emit(doc, a.output, out);
  return kOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stepwise multiple-testing constants, decisions and simulations", "stepwise"};
  app.require_subcommand(1);

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Solve a critical-constant ladder");
  add_model_options(constants, ca.model);
  constants->add_option("--kind", ca.kind, "stepdown or stepup")->capture_default_str();
  constants->add_option("--k", ca.k, "number of hypotheses")->required();
  constants->add_option("-o,--output", ca.output, "write JSON here instead of stdout");
  constants->add_flag("--no-cache", ca.no_cache, "ignore the constants cache");

  DecideArgs da;
  auto* decide = app.add_subcommand("decide", "Run a procedure on a CSV of statistics or p-values");
  add_model_options(decide, da.model);
  decide->add_option("--procedure", da.procedure, "stepdown, stepup or holm")->capture_default_str();
  decide->add_option("-i,--input", da.input, "CSV with header hypothesis_id,value")->required();
  decide->add_option("--input-kind", da.input_kind, "statistics or p-values")->capture_default_str();
  decide->add_option("-o,--output", da.output, "write JSON here instead of stdout");
  decide->add_flag("--no-cache", da.no_cache, "ignore the constants cache");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo FWER or rejection-count estimate");
  add_model_options(simulate, sa.model);
  simulate->add_option("--procedure", sa.procedure, "stepdown, stepup or holm")->capture_default_str();
  simulate->add_option("--theta", sa.theta, "comma list (inf/-inf allowed) or eps:<value>@<count>")
      ->required();
  simulate->add_option("--k", sa.k, "number of hypotheses (needed for eps: shorthand)");
  simulate->add_option("--metric", sa.metric, "fwer or reject-ge")->capture_default_str();
  simulate->add_option("--j", sa.j, "threshold count for reject-ge")->capture_default_str();
  simulate->add_flag("--false-only", sa.false_only, "count only rejections of false hypotheses");
  simulate->add_option("--reps", sa.reps, "replicates")->capture_default_str();
  simulate->add_option("--seed", sa.seed, "random seed")->capture_default_str();
  simulate->add_option("--threads", sa.threads, "worker threads (0 = hardware)");
  simulate->add_option("-o,--output", sa.output, "write JSON here instead of stdout");
  simulate->add_flag("--no-cache", sa.no_cache, "ignore the constants cache");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  verify_cmd->add_option("--level", va.level, "fast or slow")->capture_default_str();
  verify_cmd->add_option("--seed", va.seed, "base seed")->capture_default_str();
  verify_cmd->add_option("--constants", va.constants, "constants documents to check as well");
  verify_cmd->add_flag("--supplied-only", va.supplied_only, "check only the --constants documents");
  verify_cmd->add_option("-o,--output", va.output, "also write a JSON summary here");

  GridArgs ga;
  auto* grid_cmd = app.add_subcommand("grid", "Brute-force maximin over a discrete two-hypothesis grid");
  grid_cmd->add_option("--fixture", ga.fixture, "JSON with null_pmf, alt_pmf and alpha")->required();
  grid_cmd->add_option("--criterion", ga.criterion, "A1 or A2")->capture_default_str();
  grid_cmd->add_option("-o,--output", ga.output, "write JSON here instead of stdout");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*constants) return cmd_constants(ca, out);
    if (*decide) return cmd_decide(da, out);
    if (*simulate) return cmd_simulate(sa, out);
    if (*verify_cmd) return cmd_verify(va, out);
    if (*grid_cmd) return cmd_grid(ga, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const NonMonotoneLadder& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ModelError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace stepwise::cli
