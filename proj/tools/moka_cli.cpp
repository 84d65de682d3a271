#include <cstdio>

#include "CLI11.hpp"
#include "moka/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"model checking of universal temporal logics via stack-program interpretation"};
  app.require_subcommand(1);

  moka::RunOptions opts;
  auto add_common = [&](CLI::App* sub, bool needs_domain) {
    sub->add_option("--ts", opts.ts_file, "transition system file (JSON)");
    sub->add_option("--cfg", opts.cfg_file, "control-flow graph file (JSON)");
    sub->add_option("--modulus", opts.modulus, "value modulus for --cfg (overrides the file)");
    sub->add_option("--formula", opts.formula, "formula text");
    sub->add_option("--formula-file", opts.formula_file, "file containing the formula");
    sub->add_option("--dialect", opts.dialect, "actl | mu | pdl (default: inferred)");
    sub->add_option("--init", opts.init, "comma-separated initial states or 'all'");
    sub->add_option("--budget", opts.budget, "unroll / repair budget");
    sub->add_option("--seed", opts.seed, "seed echoed into the report");
    sub->add_option("--jobs", opts.jobs, "parallel jobs (reserved; runs are single-threaded)");
    sub->add_flag("--pretty", opts.pretty, "human-readable output");
    if (needs_domain) {
      sub->add_option("--domain", opts.domain_file, "abstract domain file (JSON)");
      sub->add_option("--predicates", opts.predicates_file, "predicate abstraction file (JSON)");
      sub->add_option("--equiv", opts.equiv,
                      "id | total | by_support | by_support_except:<n,..> | classes:<file>");
      sub->add_option("--mode", opts.mode, "closed | generic abstract operations");
    }
  };

  add_common(app.add_subcommand("check", "concrete counterexample check"), false);
  add_common(app.add_subcommand("abstract", "abstract interpretation verdict"), true);
  add_common(app.add_subcommand("prove", "derive a local-completeness proof"), true);
  add_common(app.add_subcommand("repair-loop", "alternate proving and domain repair"), true);
  add_common(app.add_subcommand("encode", "print the compiled stack program"), false);
  add_common(app.add_subcommand("oracle", "direct-semantics state set"), false);

  CLI11_PARSE(app, argc, argv);
  opts.subcommand = app.get_subcommands().front()->get_name();

  moka::RunOutcome out = moka::run_command(opts);
  if (opts.pretty)
    std::fputs(out.pretty.c_str(), stdout);
  else
    std::fprintf(stdout, "%s\n", out.report.c_str());
  return out.exit_code;
}
