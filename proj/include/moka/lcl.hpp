#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "moka/abstract_domain.hpp"
#include "moka/encode.hpp"

namespace moka {

struct LclError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceededError : LclError {
  using LclError::LclError;
};
struct NoStrictRefinementError : LclError {
  using LclError::LclError;
};

// A failed local-completeness proof obligation at a basic expression.
struct ObligationFailure {
  std::string expr;
  StackSet pre;
  AbstractStackSet lhs;  // alpha(f(pre))
  AbstractStackSet rhs;  // alpha(f(gamma(alpha(pre))))
  Bitset witnesses;      // current states separating the two sides
};

struct ProofNode {
  std::string rule;  // transfer | relax | seq | join | rec | iterate | mu0 | mu-plus | fix | afix
  StackSet pre, post;
  TermPtr program;
  std::vector<ProofNode> children;
  std::optional<AbstractStackSet> obligation_lhs, obligation_rhs;  // transfer leaves
  std::optional<int> afix_n;
  std::string note;
};

struct Triple {
  StackSet pre;
  TermPtr program;
  StackSet post;
};

struct TripleReport {
  bool ok = true;
  std::string violated;  // "under-approximation" | "abstraction-equality" | "local-completeness"
  std::string detail;
};

// Computes both sides of the local-completeness obligation for one basic
// expression and compares them in the stack abstraction.
std::optional<ObligationFailure> is_locally_complete(const std::string& basic, const StackSet& pre,
                                                     const AbstractStackDomain& dom);

// Checks the three validity conjuncts of a triple by direct evaluation.
TripleReport validate_triple(const Triple& t, const AbstractStackDomain& dom,
                             EvalOptions opts = {});

// Walks the tree, validating every node's triple.
TripleReport validate_proof(const ProofNode& root, const AbstractStackDomain& dom,
                            EvalOptions opts = {});

struct DeriveOptions {
  std::size_t budget = 256;          // star unrolls / approximant index cap
  std::optional<int> afix_n;         // force the approximant index
  EvalOptions eval;
};

using DeriveResult = std::variant<ProofNode, ObligationFailure>;

// Automated proof search with exact concrete postconditions. Returns the
// first failed obligation otherwise.
DeriveResult derive(const TermPtr& program, const StackSet& pre, const AbstractStackDomain& dom,
                    DeriveOptions opts = {});

// Single-element repair: joins the states of gamma(alpha(pre-projection))
// whose one-step behaviour stays inside the expression's image of the
// precondition, then intersection-closes the family around the new point.
std::shared_ptr<StateAbstraction> repair(const StateAbstraction& dom, const TransitionSystem& ts,
                                         const std::string& expr, const StackSet& pre);

// New concretizations a repair added (by set).
std::vector<Bitset> family_difference(const StateAbstraction& before,
                                      const StateAbstraction& after);

struct RepairLoopResult {
  enum class Status { Proved, Refuted, OutOfBudget } status;
  std::optional<ProofNode> proof;
  Bitset counterexamples;
  std::vector<Bitset> added_elements;  // concretizations added across repairs
  std::optional<ObligationFailure> last_failure;
  std::shared_ptr<StateAbstraction> final_domain;  // null when no repair happened
  int repairs = 0;
};

// Alternates derivation and repair until a proof closes or the budget runs
// out. Refuted postconditions contain only genuine counterexample states.
RepairLoopResult verify_with_repair_loop(const FormulaPtr& f, Dialect dialect,
                                         const TransitionSystem& ts, const StateAbstraction& dom,
                                         const FrameEquivalence& sim, const Bitset& init,
                                         std::size_t budget = 8, DeriveOptions opts = {});

std::string proof_to_text(const ProofNode& root, const AbstractStackDomain& dom);
std::string proof_to_json(const ProofNode& root, const AbstractStackDomain& dom);

}  // namespace moka
