#include "documents.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "stepwise/error.hpp"

namespace stepwise::cli {

json encode_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double decode_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw DataError("expected a number, \"inf\" or \"-inf\", got " + j.dump());
}

namespace {

json encode_array(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(encode_number(x));
  return out;
}

std::vector<double> decode_array(const json& j) {
  if (!j.is_array()) throw DataError("expected an array, got " + j.dump());
  std::vector<double> out;
  for (const auto& x : j) out.push_back(decode_number(x));
  return out;
}

void require_schema(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw DataError("document has no schema_version");
  }
  if (j.at("schema_version") != kSchemaVersion) {
    throw DataError("unsupported schema_version " + j.at("schema_version").dump());
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw DataError(where + ": '" + t + "' is not a number");
  if (std::isnan(v)) throw DataError(where + ": NaN is not allowed");
  return v;
}

}  // namespace

json model_to_json(const ModelSpec& model) {
  return {{"family", family_name(model.family())}, {"rho", model.rho()}, {"k", model.k()}};
}

ModelSpec model_from_json(const json& j) {
  try {
    return ModelSpec::make(parse_family(j.at("family").get<std::string>()), j.at("k").get<int>(),
                           j.value("rho", 0.0));
  } catch (const json::exception& e) {
    throw DataError(std::string("bad model object: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("bad model object: ") + e.what());
  }
}

json ladder_to_json(const ConstantLadder& ladder) {
  return {{"schema_version", kSchemaVersion},
          {"kind", ladder_kind_name(ladder.kind)},
          {"alpha", ladder.alpha},
          {"model", model_to_json(ladder.model)},
          {"values", encode_array(ladder.values)},
          {"residuals", encode_array(ladder.residuals)},
          {"solver_metadata",
           {{"root_width", kRootWidth},
            {"residual_tolerance", kResidualTolerance},
            {"quadrature_tolerance", 1e-10}}}};
}

ConstantLadder ladder_from_json(const json& j) {
  require_schema(j);
  try {
    ConstantLadder out{parse_ladder_kind(j.at("kind").get<std::string>()),
                       j.at("alpha").get<double>(), model_from_json(j.at("model")),
                       decode_array(j.at("values")),
                       j.contains("residuals") ? decode_array(j.at("residuals"))
                                               : std::vector<double>{}};
    if (out.k() != out.model.k()) throw DataError("values length differs from model k");
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad constants document: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("bad constants document: ") + e.what());
  }
}

bool ladder_document_matches(const json& doc, LadderKind kind, const ModelSpec& model,
                             double alpha) {
  try {
    if (doc.at("schema_version") != kSchemaVersion) return false;
    const json& meta = doc.at("solver_metadata");
    return doc.at("kind") == ladder_kind_name(kind) && doc.at("alpha").get<double>() == alpha &&
           doc.at("model") == model_to_json(model) &&
           meta.at("root_width").get<double>() == kRootWidth &&
           meta.at("residual_tolerance").get<double>() == kResidualTolerance;
  } catch (const json::exception&) {
    return false;
  }
}

namespace {

std::string_view metric_name(Metric m) { return m == Metric::Fwer ? "fwer" : "reject-ge"; }

}  // namespace

json report_to_json(const SimulationReport& r) {
  const SimulationTarget& t = r.target;
  json target = {{"metric", metric_name(t.metric)},
                 {"procedure", t.procedure},
                 {"theta", encode_array({t.theta.values().begin(), t.theta.values().end()})},
                 {"model", model_to_json(t.model)},
                 {"alpha", t.alpha}};
  if (t.metric == Metric::RejectAtLeast) {
    target["j"] = t.j;
    target["false_only"] = t.false_only;
  }
  return {{"schema_version", kSchemaVersion},
          {"estimate", r.estimate},
          {"half_width", r.half_width},
          {"reps", r.reps},
          {"seed", r.seed},
          {"target", std::move(target)}};
}

SimulationReport report_from_json(const json& j) {
  require_schema(j);
  try {
    const json& t = j.at("target");
    const std::string metric = t.at("metric").get<std::string>();
    if (metric != "fwer" && metric != "reject-ge") throw DataError("unknown metric " + metric);
    SimulationTarget target{metric == "fwer" ? Metric::Fwer : Metric::RejectAtLeast,
                            t.at("procedure").get<std::string>(),
                            ThetaVector(decode_array(t.at("theta"))),
                            model_from_json(t.at("model")),
                            t.at("alpha").get<double>(),
                            t.value("j", 0),
                            t.value("false_only", false)};
    return {j.at("estimate").get<double>(), j.at("half_width").get<double>(),
            j.at("reps").get<std::size_t>(), j.at("seed").get<std::uint64_t>(),
            std::move(target)};
  } catch (const json::exception& e) {
    throw DataError(std::string("bad report document: ") + e.what());
  }
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("input is empty");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (trim(line) != "hypothesis_id,value") {
    throw DataError("expected header 'hypothesis_id,value', got '" + trim(line) + "'");
  }
  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(lineno) + ": expected two fields");
    }
    const std::string id = trim(line.substr(0, comma));
    if (id.empty()) throw DataError("line " + std::to_string(lineno) + ": empty hypothesis_id");
    rows.push_back({id, parse_real(line.substr(comma + 1), "line " + std::to_string(lineno))});
  }
  if (rows.empty()) throw DataError("input has no data rows");
  return rows;
}

ThetaVector parse_theta(const std::string& text, std::optional<int> k) {
  if (text.rfind("eps:", 0) == 0) {
    const auto at = text.find('@');
    if (at == std::string::npos) throw InvalidArgument("theta shorthand is eps:<value>@<count>");
    if (!k) throw InvalidArgument("theta shorthand eps:<value>@<count> needs --k");
    const double eps = parse_real(text.substr(4, at - 4), "theta");
    int count = 0;
    try {
      count = std::stoi(text.substr(at + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("theta shorthand count is not an integer");
    }
    if (count < 0 || count > *k) throw InvalidArgument("theta shorthand count out of range [0, k]");
    std::vector<double> theta(*k, -kInf);
    std::fill_n(theta.begin(), count, eps);
    return ThetaVector(std::move(theta));
  }
  std::vector<double> theta;
  std::stringstream ss(text);
  std::string token;
  try {
    while (std::getline(ss, token, ',')) theta.push_back(parse_real(token, "theta"));
  } catch (const DataError& e) {
    throw InvalidArgument(e.what());
  }
  if (theta.empty()) throw InvalidArgument("theta is empty");
  if (k && static_cast<int>(theta.size()) != *k) {
    throw InvalidArgument("theta has " + std::to_string(theta.size()) + " entries but k is " +
                          std::to_string(*k));
  }
  return ThetaVector(std::move(theta));
}

GridFixture grid_fixture_from_json(const json& j) {
  try {
    return {grid::GridModel::make(j.at("null_pmf").get<std::vector<double>>(),
                                  j.at("alt_pmf").get<std::vector<double>>()),
            j.at("alpha").get<double>()};
  } catch (const json::exception& e) {
    throw DataError(std::string("bad grid fixture: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("bad grid fixture: ") + e.what());
  }
}

}  // namespace stepwise::cli
