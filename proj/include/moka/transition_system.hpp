#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moka/bitset.hpp"

namespace moka {

struct TsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Environments of a control-flow graph, packed as digit tuples mod k.
struct Cfg {
  struct Stmt {
    enum Kind { AssignVar, AssignConst, AssignAdd, GuardEqConst, GuardNeqConst, GuardEqVar,
                GuardNeqVar } kind;
    int lhs = -1;   // variable index
    int rhs = -1;   // variable index, when applicable
    int value = 0;  // constant, when applicable
  };
  struct Edge {
    int from, to;
    std::vector<Stmt> stmts;  // sequential composition
    std::string label;        // source text
  };

  std::vector<std::string> nodes;
  int start = -1, end = -1;
  std::vector<std::string> vars;
  int modulus = 0;
  std::vector<Edge> edges;
};

// Extra structure kept when a system was built from a CFG; drives the
// per-node predicate abstraction and the support equivalences.
struct CfgInfo {
  std::vector<std::string> nodes;
  std::vector<std::string> vars;
  int modulus = 0;
  std::vector<int> node_of;              // per state
  std::vector<std::vector<int>> env_of;  // per state, variable values
};

class TransitionSystem {
public:
  std::size_t num_states() const { return names_.size(); }
  const std::string& name(std::size_t s) const { return names_[s]; }
  std::optional<std::size_t> state_id(const std::string& n) const;

  const Bitset& init() const { return init_; }
  const Bitset& successors(std::size_t s) const { return succ_[s]; }
  Bitset post(const Bitset& xs) const;
  Bitset pre(const Bitset& xs) const;

  bool has_prop(const std::string& p) const { return props_.count(p) > 0; }
  // Set of states satisfying p; negated names ("!p") resolve to complements.
  Bitset prop_states(const std::string& p) const;
  bool holds(std::size_t s, const std::string& p) const { return prop_states(p).test(s); }
  std::vector<std::string> prop_names() const;

  Bitset states_from_names(const std::vector<std::string>& ns) const;
  std::vector<std::string> names_of(const Bitset& xs) const;

  const std::optional<CfgInfo>& cfg_info() const { return cfg_; }

  // Throws on violated invariants: NotTotal names the stuck state,
  // InconsistentLabeling a doubly-labelled proposition.
  void validate() const;

  std::string to_json() const;

  friend TransitionSystem parse_ts(const std::string& text);
  friend TransitionSystem make_ts(std::vector<std::string> names,
                                  std::vector<std::pair<std::string, std::string>> edges,
                                  std::map<std::string, std::vector<std::string>> labeling,
                                  std::vector<std::string> init);
  friend TransitionSystem cfg_to_ts(const Cfg& cfg);

private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> ids_;
  std::vector<Bitset> succ_;
  Bitset init_;
  std::map<std::string, Bitset> props_;  // positive labellings, "tt" included
  std::optional<CfgInfo> cfg_;
};

TransitionSystem parse_ts(const std::string& text);
TransitionSystem make_ts(std::vector<std::string> names,
                         std::vector<std::pair<std::string, std::string>> edges,
                         std::map<std::string, std::vector<std::string>> labeling,
                         std::vector<std::string> init = {});

Cfg parse_cfg(const std::string& text, std::optional<int> modulus_override = std::nullopt);

// Expands a CFG into the induced system over nodes x environments, adding
// self-loops at every end-node state so the relation is total. States are
// named "(node,digits)" and labelled with "n=<node>" and all comparisons
// "v=c" / "v=w" over the declared variables.
TransitionSystem cfg_to_ts(const Cfg& cfg);

}  // namespace moka
