#include "moka/run.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "moka/lcl.hpp"
#include "moka/semantics.hpp"

namespace moka {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Dialect dialect_of(const std::string& name) {
  if (name == "actl") return Dialect::Actl;
  if (name == "mu") return Dialect::Mu;
  if (name == "pdl") return Dialect::Pdl;
  throw std::runtime_error("unknown dialect: " + name);
}

std::string dialect_name(Dialect d) {
  switch (d) {
    case Dialect::Actl: return "actl";
    case Dialect::Mu: return "mu";
    case Dialect::Pdl: return "pdl";
  }
  return "?";
}

struct Inputs {
  TransitionSystem ts;
  FormulaPtr formula;
  Dialect dialect = Dialect::Actl;
  Bitset init;
};

Inputs load_inputs(const RunOptions& o, bool need_formula, bool need_ts = true) {
  Inputs in;
  if (!o.ts_file.empty()) {
    in.ts = parse_ts(slurp(o.ts_file));
  } else if (!o.cfg_file.empty()) {
    auto cfg = parse_cfg(slurp(o.cfg_file),
                         o.modulus > 0 ? std::optional<int>(o.modulus) : std::nullopt);
    in.ts = cfg_to_ts(cfg);
  } else if (need_ts) {
    throw std::runtime_error("one of --ts or --cfg is required");
  }

  if (need_formula) {
    std::string text = o.formula;
    if (text.empty() && !o.formula_file.empty()) text = slurp(o.formula_file);
    if (text.empty()) throw std::runtime_error("--formula or --formula-file is required");
    if (o.dialect.empty()) {
      auto [f, d] = parse_formula_any(text);
      in.formula = f;
      in.dialect = d;
    } else {
      in.dialect = dialect_of(o.dialect);
      in.formula = parse_formula(text, in.dialect);
    }
  }

  if (!need_ts) return in;

  if (o.init.empty()) {
    in.init = in.ts.init();
    if (in.init.empty()) in.init = Bitset::full(in.ts.num_states());
  } else if (o.init == "all") {
    in.init = Bitset::full(in.ts.num_states());
  } else {
    // split on commas outside parentheses; CFG state names contain commas
    std::vector<std::string> names;
    std::string cur;
    int depth = 0;
    for (char c : o.init) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        if (!cur.empty()) names.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) names.push_back(cur);
    in.init = in.ts.states_from_names(names);
  }
  return in;
}

std::shared_ptr<StateAbstraction> load_domain(const RunOptions& o, const TransitionSystem& ts) {
  if (!o.domain_file.empty()) return load_state_abstraction(slurp(o.domain_file), ts);
  if (!o.predicates_file.empty()) return build_predicate_abstraction(slurp(o.predicates_file), ts);
  throw std::runtime_error("--domain or --predicates is required");
}

FrameEquivalence load_equiv(const RunOptions& o) {
  if (o.equiv.rfind("classes:", 0) == 0) {
    json j = json::parse(slurp(o.equiv.substr(8)));
    return FrameEquivalence::from_classes(
        j.at("classes").get<std::vector<std::vector<std::string>>>());
  }
  return FrameEquivalence::parse(o.equiv);
}

json echo(const RunOptions& o) {
  json j;
  j["subcommand"] = o.subcommand;
  if (!o.ts_file.empty()) j["ts"] = o.ts_file;
  if (!o.cfg_file.empty()) j["cfg"] = o.cfg_file;
  if (!o.formula.empty()) j["formula"] = o.formula;
  if (!o.dialect.empty()) j["dialect"] = o.dialect;
  if (!o.init.empty()) j["init"] = o.init;
  if (!o.domain_file.empty()) j["domain"] = o.domain_file;
  if (!o.predicates_file.empty()) j["predicates"] = o.predicates_file;
  j["equiv"] = o.equiv;
  j["mode"] = o.mode;
  j["seed"] = o.seed;
  return j;
}

}  // namespace

RunOutcome run_command(const RunOptions& o) {
  auto started = std::chrono::steady_clock::now();
  json report;
  RunOutcome out;
  try {
    report["command"] = echo(o);

    if (o.subcommand == "encode") {
      Inputs in = load_inputs(o, true, /*need_ts=*/false);
      report["dialect"] = dialect_name(in.dialect);
      report["term"] = to_string(encode(in.formula, in.dialect));
      out.exit_code = 0;
      out.pretty = report["term"].get<std::string>() + "\n";
    } else if (o.subcommand == "oracle") {
      Inputs in = load_inputs(o, true);
      Bitset states = sem(in.formula, in.dialect, in.ts);
      Bitset violating = in.init - states;
      report["dialect"] = dialect_name(in.dialect);
      report["satisfying"] = in.ts.names_of(states);
      report["counterexamples"] = in.ts.names_of(violating);
      report["verdict"] = violating.empty() ? "holds" : "counterexamples";
      out.exit_code = violating.empty() ? 0 : 1;
      out.pretty = "oracle: " + report["verdict"].get<std::string>() + "\n";
    } else if (o.subcommand == "check") {
      Inputs in = load_inputs(o, true);
      auto result = check_concrete(in.formula, in.dialect, in.ts, in.init);
      report["dialect"] = dialect_name(in.dialect);
      report["counterexamples"] = in.ts.names_of(result.counterexamples);
      report["failure_stacks"] = to_string(result.failure_stacks, in.ts);
      report["verdict"] = result.counterexamples.empty() ? "holds" : "counterexamples";
      out.exit_code = result.counterexamples.empty() ? 0 : 1;
      out.pretty = "check: " + report["verdict"].get<std::string>() + "\n";
      for (const auto& n : in.ts.names_of(result.counterexamples))
        out.pretty += "  " + n + "\n";
    } else if (o.subcommand == "abstract") {
      Inputs in = load_inputs(o, true);
      auto dom = load_domain(o, in.ts);
      auto sim = load_equiv(o);
      BcaMode mode = o.mode == "closed" ? BcaMode::Closed : BcaMode::Generic;
      auto v = check_abstract(in.formula, in.dialect, in.ts, *dom, sim, in.init, mode);
      AbstractStackDomain adom(in.ts, *dom, sim, mode);
      report["dialect"] = dialect_name(in.dialect);
      report["verdict"] = v.proved ? "proved" : "alarm";
      report["abstract_output"] = adom.render(v.output);
      report["candidates"] = in.ts.names_of(v.candidates);
      out.exit_code = v.proved ? 0 : 2;
      out.pretty = "abstract: " + report["verdict"].get<std::string>() + " " +
                   adom.render(v.output) + "\n";
    } else if (o.subcommand == "prove") {
      Inputs in = load_inputs(o, true);
      auto dom = load_domain(o, in.ts);
      auto sim = load_equiv(o);
      AbstractStackDomain adom(in.ts, *dom, sim, BcaMode::Generic);
      DeriveOptions dopts;
      dopts.budget = o.budget;
      auto r = derive(encode(in.formula, in.dialect), lift_states(in.init, in.ts), adom, dopts);
      report["dialect"] = dialect_name(in.dialect);
      if (auto* proof = std::get_if<ProofNode>(&r)) {
        Bitset cex = current_states(proof->post, in.ts);
        report["verdict"] = cex.empty() ? "proved" : "refuted";
        report["counterexamples"] = in.ts.names_of(cex);
        report["proof"] = json::parse(proof_to_json(*proof, adom));
        out.exit_code = cex.empty() ? 0 : 1;
        out.pretty = proof_to_text(*proof, adom);
      } else {
        auto fail = std::get<ObligationFailure>(r);
        report["verdict"] = "obligation-failure";
        report["obligation_failure"] = {{"expr", fail.expr},
                                        {"pre", to_string(fail.pre, in.ts)},
                                        {"lhs", adom.render(fail.lhs)},
                                        {"rhs", adom.render(fail.rhs)},
                                        {"witnesses", in.ts.names_of(fail.witnesses)}};
        out.exit_code = 2;
        out.pretty = "obligation failure at " + fail.expr + ": " + adom.render(fail.lhs) +
                     " vs " + adom.render(fail.rhs) + "\n";
      }
    } else if (o.subcommand == "repair-loop") {
      Inputs in = load_inputs(o, true);
      auto dom = load_domain(o, in.ts);
      auto sim = load_equiv(o);
      DeriveOptions dopts;
      dopts.budget = o.budget;
      auto r = verify_with_repair_loop(in.formula, in.dialect, in.ts, *dom, sim, in.init,
                                       o.budget, dopts);
      report["dialect"] = dialect_name(in.dialect);
      report["repairs"] = r.repairs;
      json added = json::array();
      for (const auto& g : r.added_elements) added.push_back(in.ts.names_of(g));
      report["added_elements"] = added;
      switch (r.status) {
        case RepairLoopResult::Status::Proved:
          report["verdict"] = "proved";
          out.exit_code = 0;
          break;
        case RepairLoopResult::Status::Refuted:
          report["verdict"] = "refuted";
          report["counterexamples"] = in.ts.names_of(r.counterexamples);
          out.exit_code = 1;
          break;
        case RepairLoopResult::Status::OutOfBudget:
          report["verdict"] = "out-of-budget";
          out.exit_code = 2;
          break;
      }
      if (r.proof) {
        const StateAbstraction& final_dom = r.final_domain ? *r.final_domain : *dom;
        AbstractStackDomain adom(in.ts, final_dom, sim, BcaMode::Generic);
        report["proof"] = json::parse(proof_to_json(*r.proof, adom));
        out.pretty = "repair-loop: " + report["verdict"].get<std::string>() + " after " +
                     std::to_string(r.repairs) + " repair(s)\n" + proof_to_text(*r.proof, adom);
      } else {
        out.pretty = "repair-loop: " + report["verdict"].get<std::string>() + "\n";
      }
    } else {
      throw std::runtime_error("unknown subcommand: " + o.subcommand);
    }
  } catch (const std::exception& e) {
    report["error"] = e.what();
    out.exit_code = 3;
    out.pretty = std::string("error: ") + e.what() + "\n";
  }
  auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  report["elapsed_ms"] = elapsed.count();
  out.report = report.dump(2);
  return out;
}

}  // namespace moka
