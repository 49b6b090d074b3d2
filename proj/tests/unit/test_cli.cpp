#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "documents.hpp"
#include "stepwise/error.hpp"
#include "stepwise/power.hpp"

using namespace stepwise;
using namespace stepwise::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(STEPWISE_FIXTURE_DIR) + "/" + name; }

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("stepwise-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("constants command") {
  const Run r = run({"constants", "--family", "iid-uniform", "--k", "2", "--alpha", "0.05",
                     "--kind", "stepup", "--no-cache"});
  REQUIRE(r.code == kOk);
  const json doc = json::parse(r.out);
  CHECK(doc["schema_version"] == kSchemaVersion);
  CHECK(doc["values"][0].get<double>() == doctest::Approx(0.95));
  CHECK(doc["values"][1].get<double>() == doctest::Approx(0.975).epsilon(1e-10));
  CHECK(doc["model"]["family"] == "iid-uniform");

  const Run down = run({"constants", "--kind", "stepdown", "--k", "1", "--no-cache"});
  const Run up = run({"constants", "--kind", "stepup", "--k", "1", "--no-cache"});
  CHECK(json::parse(down.out)["values"] == json::parse(up.out)["values"]);

  CHECK(run({"constants", "--family", "equicorr-normal", "--rho", "1", "--k", "2"}).code == kUsageError);
  CHECK(run({"constants", "--k", "2", "--alpha", "1.5"}).code == kUsageError);
  CHECK(run({"constants", "--k", "2", "--kind", "sideways"}).code == kUsageError);
  CHECK(run({"constants"}).code == kUsageError);
  CHECK(run({}).code == kUsageError);
  CHECK(run({"--help"}).code == kOk);
}

TEST_CASE("decide worked example") {
  const Run r = run({"decide", "--family", "iid-uniform", "--input", fixture("worked_example.csv"),
                     "--no-cache"});
  REQUIRE(r.code == kOk);
  const json doc = json::parse(r.out);
  const json& v = doc["verdicts"];
  CHECK(v[0]["id"] == "H1");
  CHECK(v[0]["verdict"] == "reject");
  CHECK(v[1]["verdict"] == "reject");
  CHECK(v[2]["verdict"] == "accept");
  CHECK(v[0]["step"] == 1);
  CHECK(v[2]["threshold"].get<double>() == doctest::Approx(0.95));
  CHECK(doc["trace"].size() == 3);
  CHECK(doc["metadata"]["rejected"] == 2);
}

TEST_CASE("decide on p-values") {
  const Run none = run({"decide", "--input-kind", "p-values", "--procedure", "stepup", "--input",
                        fixture("pvalues_all_one.csv"), "--no-cache"});
  REQUIRE(none.code == kOk);
  const json doc = json::parse(none.out);
  CHECK(doc["metadata"]["rejected"] == 0);
  CHECK(doc["verdicts"][0]["statistic"] == "-inf");
  CHECK(doc["metadata"]["transform"] != "none");

  const Run holm = run({"decide", "--input-kind", "p-values", "--procedure", "holm", "--input",
                        fixture("pvalues_all_one.csv")});
  CHECK(holm.code == kOk);
  CHECK(run({"decide", "--input-kind", "p-values", "--input", fixture("pvalues_out_of_range.csv")}).code ==
        kDataError);
  CHECK(run({"decide", "--input-kind", "p-values", "--family", "iid-uniform", "--input",
             fixture("pvalues_all_one.csv")})
            .code == kUsageError);
}

TEST_CASE("decide input errors") {
  CHECK(run({"decide", "--input", fixture("empty.csv")}).code == kDataError);
  CHECK(run({"decide", "--input", fixture("header_only.csv")}).code == kDataError);
  CHECK(run({"decide", "--input", fixture("nan_value.csv")}).code == kDataError);
  CHECK(run({"decide", "--input", fixture("missing.csv")}).code == kDataError);
}

TEST_CASE("csv parsing") {
  std::istringstream crlf("hypothesis_id,value\r\nA,1.5\r\nB,-inf\r\n\r\n");
  const auto rows = parse_csv(crlf);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].id == "B");
  CHECK(rows[1].value == -kInf);
  std::istringstream bad_header("id,value\nA,1\n");
  CHECK_THROWS_AS(parse_csv(bad_header), DataError);
  std::istringstream extra("hypothesis_id,value\nA,1,2\n");
  CHECK_THROWS_AS(parse_csv(extra), DataError);
  std::istringstream junk("hypothesis_id,value\nA,1.5x\n");
  CHECK_THROWS_AS(parse_csv(junk), DataError);
}

TEST_CASE("theta parsing") {
  CHECK(parse_theta("0,0,inf", std::nullopt) == ThetaVector({0.0, 0.0, kInf}));
  CHECK(parse_theta("eps:2@2", 3) == ThetaVector({2.0, 2.0, -kInf}));
  CHECK_THROWS_AS(parse_theta("eps:2@2", std::nullopt), InvalidArgument);
  CHECK_THROWS_AS(parse_theta("1,2", 3), InvalidArgument);
  CHECK_THROWS_AS(parse_theta("1,abc", std::nullopt), InvalidArgument);
}

TEST_CASE("simulate command") {
  const std::vector<std::string> args{"simulate", "--theta", "0,0,inf", "--metric", "fwer",
                                      "--reps",   "200000",  "--seed",  "7", "--no-cache"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == kOk);
  CHECK(a.out == b.out);
  const json doc = json::parse(a.out);
  CHECK(std::abs(doc["estimate"].get<double>() - 0.05) <= doc["half_width"].get<double>());
  CHECK(doc["target"]["theta"][2] == "inf");

  const Run p = run({"simulate", "--k", "3", "--theta", "eps:2@2", "--metric", "reject-ge", "--j",
                     "2", "--reps", "200000", "--no-cache"});
  REQUIRE(p.code == kOk);
  const json pd = json::parse(p.out);
  const double beta = beta_stepdown(ModelSpec::iid_normal(3), 0.05, 3, 2, 2.0).value;
  CHECK(std::abs(pd["estimate"].get<double>() - beta) <= pd["half_width"].get<double>());

  CHECK(run({"simulate", "--theta", "1,2", "--metric", "fwer"}).code == kUsageError);
  CHECK(run({"simulate", "--theta", "0,0", "--metric", "power"}).code == kUsageError);
}

TEST_CASE("documents round-trip") {
  const ConstantLadder ladder = solve_stepup(ModelSpec::equicorr_normal(4, 0.3), 0.1);
  const json doc = ladder_to_json(ladder);
  const json again = ladder_to_json(ladder_from_json(json::parse(doc.dump())));
  CHECK(doc == again);
  const ConstantLadder back = ladder_from_json(doc);
  CHECK(back.values == ladder.values);
  CHECK(back.model == ladder.model);

  const ModelSpec m = ModelSpec::iid_normal(3);
  const SimulationReport r = estimate_fwer(m, ThetaVector({0.0, kInf, -kInf}),
                                           Procedure::make(ProcedureKind::Holm, m, 0.05), 20'000, 3);
  const json rd = report_to_json(r);
  CHECK(report_to_json(report_from_json(json::parse(rd.dump()))) == rd);

  json bad = doc;
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(ladder_from_json(bad), DataError);
}

TEST_CASE("constants cache") {
  const auto dir = scratch_dir("cache");
  setenv("STEPWISE_CACHE_DIR", dir.c_str(), 1);
  const Run first = run({"constants", "--k", "3", "--kind", "stepup"});
  REQUIRE(first.code == kOk);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
  REQUIRE(files.size() == 1);

  // A matching entry is reused verbatim, even if edited.
  json cached = json::parse(std::ifstream(files[0]));
  cached["values"][2] = 9.0;
  std::ofstream(files[0]) << cached.dump();
  CHECK(json::parse(run({"constants", "--k", "3", "--kind", "stepup"}).out)["values"][2] == 9.0);
  CHECK(json::parse(run({"constants", "--k", "3", "--kind", "stepup", "--no-cache"}).out)["values"][2] !=
        9.0);

  // A mismatched solver tolerance invalidates the entry.
  cached["solver_metadata"]["root_width"] = 1e-6;
  std::ofstream(files[0]) << cached.dump();
  CHECK(json::parse(run({"constants", "--k", "3", "--kind", "stepup"}).out)["values"][2] != 9.0);
  unsetenv("STEPWISE_CACHE_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify flags a wrong constant by name") {
  const Run bad = run({"verify", "--supplied-only", "--constants", fixture("wrong_constant.json")});
  CHECK(bad.code == kVerifyFailed);
  CHECK(bad.out.find("FAIL  [0] supplied constants: defining-equation residual") != std::string::npos);
  const Run good = run({"verify", "--supplied-only", "--constants", fixture("good_constants.json")});
  CHECK(good.code == kOk);
  CHECK(run({"verify", "--level", "medium"}).code == kUsageError);
}

TEST_CASE("grid command") {
  const Run r = run({"grid", "--fixture", fixture("grid_m8.json"), "--criterion", "A1"});
  REQUIRE(r.code == kOk);
  const json doc = json::parse(r.out);
  CHECK(doc["m"] == 8);
  CHECK(doc["discretized"]["value"].get<double>() == doctest::Approx(doc["value"].get<double>()).epsilon(1e-12));
  const Run a2 = run({"grid", "--fixture", fixture("grid_m8.json"), "--criterion", "A2"});
  CHECK(a2.code == kOk);
  CHECK(run({"grid", "--fixture", fixture("worked_example.csv")}).code == kDataError);
}
