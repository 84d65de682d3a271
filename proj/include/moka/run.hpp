#pragma once

#include <cstdint>
#include <string>

namespace moka {

struct RunOptions {
  std::string subcommand;  // check | abstract | prove | repair-loop | encode | oracle
  std::string ts_file;
  std::string cfg_file;
  int modulus = 0;  // 0: take the CFG file's value
  std::string formula;
  std::string formula_file;
  std::string dialect;  // empty: inferred
  std::string init;     // empty: file initial states (all states when none), "all", or a list
  std::string domain_file;
  std::string predicates_file;
  std::string equiv = "total";
  std::size_t budget = 64;
  std::string mode = "generic";  // closed | generic
  std::uint64_t seed = 0;
  bool pretty = false;
  int jobs = 1;
};

struct RunOutcome {
  int exit_code = 0;   // 0 holds/proved, 1 counterexamples, 2 alarm/unknown, 3 usage error
  std::string report;  // JSON
  std::string pretty;  // human-readable rendering
};

RunOutcome run_command(const RunOptions& opts);

}  // namespace moka
