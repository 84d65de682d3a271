#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "moka/lcl.hpp"
#include "moka/run.hpp"
#include "moka/semantics.hpp"

namespace py = pybind11;

namespace {

std::pair<moka::FormulaPtr, moka::Dialect> parse_any(const std::string& formula,
                                                     const std::string& dialect) {
  if (dialect.empty()) return moka::parse_formula_any(formula);
  moka::Dialect d = dialect == "actl"  ? moka::Dialect::Actl
                    : dialect == "mu"  ? moka::Dialect::Mu
                    : dialect == "pdl" ? moka::Dialect::Pdl
                                       : throw moka::FormulaError("unknown dialect: " + dialect);
  return {moka::parse_formula(formula, d), d};
}

std::vector<std::string> check(const std::string& ts_json, const std::string& formula,
                               const std::string& dialect,
                               const std::vector<std::string>& init) {
  auto ts = moka::parse_ts(ts_json);
  auto [f, d] = parse_any(formula, dialect);
  moka::Bitset in =
      init.empty() ? moka::Bitset::full(ts.num_states()) : ts.states_from_names(init);
  auto result = moka::check_concrete(f, d, ts, in);
  return ts.names_of(result.counterexamples);
}

std::vector<std::string> oracle(const std::string& ts_json, const std::string& formula,
                                const std::string& dialect) {
  auto ts = moka::parse_ts(ts_json);
  auto [f, d] = parse_any(formula, dialect);
  return ts.names_of(moka::sem(f, d, ts));
}

std::string encode_str(const std::string& formula, const std::string& dialect) {
  auto [f, d] = parse_any(formula, dialect);
  return moka::to_string(moka::encode(f, d));
}

py::tuple run(const std::map<std::string, std::string>& options) {
  moka::RunOptions o;
  auto get = [&](const char* k) {
    auto it = options.find(k);
    return it == options.end() ? std::string{} : it->second;
  };
  o.subcommand = get("subcommand");
  o.ts_file = get("ts");
  o.cfg_file = get("cfg");
  if (auto m = get("modulus"); !m.empty()) o.modulus = std::stoi(m);
  o.formula = get("formula");
  o.formula_file = get("formula_file");
  o.dialect = get("dialect");
  o.init = get("init");
  o.domain_file = get("domain");
  o.predicates_file = get("predicates");
  if (auto e = get("equiv"); !e.empty()) o.equiv = e;
  if (auto b = get("budget"); !b.empty()) o.budget = std::stoul(b);
  if (auto m = get("mode"); !m.empty()) o.mode = m;
  auto out = moka::run_command(o);
  return py::make_tuple(out.exit_code, out.report);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "model checking of universal temporal logics via stack-program interpretation";

  m.def("encode", &encode_str, py::arg("formula"), py::arg("dialect") = "",
        "Compile a formula into its counterexample stack program.");
  m.def("check", &check, py::arg("ts_json"), py::arg("formula"), py::arg("dialect") = "",
        py::arg("init") = std::vector<std::string>{},
        "Concrete counterexample states of a formula over a JSON system.");
  m.def("oracle", &oracle, py::arg("ts_json"), py::arg("formula"), py::arg("dialect") = "",
        "States satisfying a formula, by the direct semantics.");
  m.def("run", &run, py::arg("options"),
        "Run a CLI-style command; returns (exit_code, json_report).");
  m.def("ts_roundtrip",
        [](const std::string& text) { return moka::parse_ts(text).to_json(); },
        "Parse and re-serialize a system file.");
}
