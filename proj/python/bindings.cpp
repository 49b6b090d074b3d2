#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "stepwise/constants.hpp"
#include "stepwise/error.hpp"
#include "stepwise/gridoracle.hpp"
#include "stepwise/power.hpp"
#include "stepwise/procedures.hpp"
#include "stepwise/simharness.hpp"
#include "stepwise/verify.hpp"

namespace py = pybind11;
using namespace stepwise;

namespace {

ModelSpec make_model(const std::string& family, int k, double rho) {
  return ModelSpec::make(parse_family(family), k, rho);
}

std::vector<bool> verdict_mask(const Decision& d) {
  std::vector<bool> out(d.verdicts.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d.is_rejected(i);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stepwise multiple-testing procedures with exact critical constants";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<NonMonotoneLadder>(m, "NonMonotoneLadder", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_model), py::arg("family"), py::arg("k"), py::arg("rho") = 0.0)
      .def_property_readonly("k", &ModelSpec::k)
      .def_property_readonly("rho", &ModelSpec::rho)
      .def_property_readonly("family", [](const ModelSpec& s) { return std::string(family_name(s.family())); })
      .def("__repr__", &ModelSpec::describe)
      .def(py::self == py::self);

  py::class_<ConstantLadder>(m, "ConstantLadder")
      .def_property_readonly("kind", [](const ConstantLadder& l) { return std::string(ladder_kind_name(l.kind)); })
      .def_readonly("alpha", &ConstantLadder::alpha)
      .def_readonly("model", &ConstantLadder::model)
      .def_readonly("values", &ConstantLadder::values)
      .def_readonly("residuals", &ConstantLadder::residuals)
      .def("step_threshold", &ConstantLadder::step_threshold);

  m.def("solve_ladder",
        [](const std::string& kind, const ModelSpec& model, double alpha) {
          return solve_ladder(parse_ladder_kind(kind), model, alpha);
        },
        py::arg("kind"), py::arg("model"), py::arg("alpha"));

  m.def("stepdown_decide", [](const std::vector<double>& x, const ConstantLadder& l) {
    return verdict_mask(stepdown_decide(x, l));
  });
  m.def("stepup_decide", [](const std::vector<double>& x, const ConstantLadder& l) {
    return verdict_mask(stepup_decide(x, l));
  });
  m.def("holm_bonferroni", [](const std::vector<double>& p, double alpha) {
    return verdict_mask(holm_bonferroni(p, alpha));
  });

  py::class_<PairConstants>(m, "PairConstants")
      .def_readonly("alpha", &PairConstants::alpha)
      .def_readonly("epsilon", &PairConstants::epsilon)
      .def_readonly("a", &PairConstants::a)
      .def_readonly("b", &PairConstants::b)
      .def_readonly("a_tilde", &PairConstants::a_tilde)
      .def_readonly("residuals", &PairConstants::residuals);
  m.def("solve_pair_constants", &solve_pair_constants, py::arg("model"), py::arg("alpha"),
        py::arg("epsilon"));
  m.def("pair_classify",
        [](double x1, double x2, const PairConstants& c, const std::string& variant) {
          if (variant != "stepdown" && variant != "stepup") {
            throw InvalidArgument("variant must be stepdown or stepup");
          }
          const auto v = variant == "stepdown" ? PairVariant::StepdownOpt : PairVariant::StepupOpt;
          return std::string(pair_region_name(pair_classify(x1, x2, c, v)));
        },
        py::arg("x1"), py::arg("x2"), py::arg("constants"), py::arg("variant"));

  m.def("beta_stepdown",
        [](const ModelSpec& model, double alpha, int k, int j, double eps) {
          return beta_stepdown(model, alpha, k, j, eps).value;
        },
        py::arg("model"), py::arg("alpha"), py::arg("k"), py::arg("j"), py::arg("epsilon"));
  m.def("beta_stepup",
        [](const ModelSpec& model, double alpha, int k, int j, double eps) {
          return beta_stepup(model, alpha, k, j, eps).value;
        },
        py::arg("model"), py::arg("alpha"), py::arg("k"), py::arg("j"), py::arg("epsilon"));

  py::class_<SimulationReport>(m, "SimulationReport")
      .def_readonly("estimate", &SimulationReport::estimate)
      .def_readonly("half_width", &SimulationReport::half_width)
      .def_readonly("reps", &SimulationReport::reps)
      .def_readonly("seed", &SimulationReport::seed)
      .def("covers", &SimulationReport::covers);

  m.def("estimate_fwer",
        [](const ModelSpec& model, const std::vector<double>& theta, const std::string& procedure,
           double alpha, std::size_t reps, std::uint64_t seed) {
          const Procedure p = Procedure::make(parse_procedure_kind(procedure), model, alpha);
          py::gil_scoped_release release;
          return estimate_fwer(model, ThetaVector(theta), p, reps, seed);
        },
        py::arg("model"), py::arg("theta"), py::arg("procedure"), py::arg("alpha"),
        py::arg("reps"), py::arg("seed"));
  m.def("estimate_reject_at_least",
        [](const ModelSpec& model, const std::vector<double>& theta, const std::string& procedure,
           double alpha, int j, std::size_t reps, std::uint64_t seed, bool false_only) {
          const Procedure p = Procedure::make(parse_procedure_kind(procedure), model, alpha);
          py::gil_scoped_release release;
          return estimate_reject_at_least(model, ThetaVector(theta), p, j, reps, seed, false_only);
        },
        py::arg("model"), py::arg("theta"), py::arg("procedure"), py::arg("alpha"), py::arg("j"),
        py::arg("reps"), py::arg("seed"), py::arg("false_only") = false);

  m.def("grid_maximin",
        [](const std::vector<double>& null_pmf, const std::vector<double>& alt_pmf, double alpha,
           const std::string& criterion) {
          const auto model = grid::GridModel::make(null_pmf, alt_pmf);
          const auto crit = criterion == "A2" ? grid::GridCriterion::A2 : grid::GridCriterion::A1;
          const auto r = grid::brute_force_maximin(model, alpha, crit);
          std::vector<std::pair<std::array<int, 2>, std::array<int, 2>>> rules;
          for (const auto& t : r.maximizers) rules.emplace_back(t.a, t.b);
          return py::make_tuple(r.value, rules);
        },
        py::arg("null_pmf"), py::arg("alt_pmf"), py::arg("alpha"), py::arg("criterion") = "A1");

  m.def("verify",
        [](const std::string& level) {
          verify::Options options;
          options.level = verify::parse_level(level);
          std::vector<verify::CheckResult> results;
          {
            py::gil_scoped_release release;
            results = verify::run_suite(options);
          }
          py::list out;
          for (const auto& r : results) {
            out.append(py::dict(py::arg("criterion") = r.criterion, py::arg("name") = r.name,
                                py::arg("passed") = r.passed, py::arg("skipped") = r.skipped,
                                py::arg("detail") = r.detail, py::arg("seconds") = r.seconds));
          }
          return out;
        },
        py::arg("level") = "fast");
}
