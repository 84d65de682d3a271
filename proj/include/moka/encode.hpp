#pragma once

#include "moka/formula.hpp"
#include "moka/stacks.hpp"
#include "moka/term.hpp"

namespace moka {

// Compiles a formula into the stack program that filters out exactly the
// stacks whose current state violates it.
TermPtr encode(const FormulaPtr& f, Dialect dialect);

// Variant of the fixpoint encodings instrumented with the "!loop?" test; the
// two compilations have the same semantics and tests cross-check them.
TermPtr encode_instrumented(const FormulaPtr& f);

struct CheckResult {
  Bitset counterexamples;   // states of I violating the formula
  StackSet failure_stacks;  // raw output of the compiled program
};

// Runs the compiled program on the lifted initial states and projects the
// surviving stacks to their current states.
CheckResult check_concrete(const FormulaPtr& f, Dialect dialect, const TransitionSystem& ts,
                           const Bitset& init, EvalOptions opts = {});

}  // namespace moka
