#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "stepwise/constants.hpp"
#include "stepwise/gridoracle.hpp"
#include "stepwise/procedures.hpp"
#include "stepwise/simharness.hpp"

namespace stepwise::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or out-of-range input data (exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Infinities travel as the strings "inf" / "-inf".
json encode_number(double v);
double decode_number(const json& j);

json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const json& j);

json ladder_to_json(const ConstantLadder& ladder);
ConstantLadder ladder_from_json(const json& j);

/// True when a cached document was produced for exactly this request.
bool ladder_document_matches(const json& doc, LadderKind kind, const ModelSpec& model,
                             double alpha);

json report_to_json(const SimulationReport& report);
SimulationReport report_from_json(const json& j);

struct CsvRow {
  std::string id;
  double value;
};

/// Header `hypothesis_id,value`; LF or CRLF line ends; blank trailing lines ignored.
std::vector<CsvRow> parse_csv(std::istream& in);

/// Comma list of reals with `inf` / `-inf`, or `eps:<value>@<count>` meaning
/// count coordinates at value and the rest at -inf (needs k).
ThetaVector parse_theta(const std::string& text, std::optional<int> k);

struct GridFixture {
  grid::GridModel model;
  double alpha;
};

/// {"null_pmf": [...], "alt_pmf": [...], "alpha": a}.
GridFixture grid_fixture_from_json(const json& j);

}  // namespace stepwise::cli
