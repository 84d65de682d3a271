#pragma once

#include <map>

#include "moka/bitset.hpp"
#include "moka/formula.hpp"
#include "moka/transition_system.hpp"

namespace moka {

using Valuation = std::map<std::string, Bitset>;

struct UnboundLogicVarError : FormulaError {
  using FormulaError::FormulaError;
};

// Definitional state semantics; path operators via their fixpoint
// characterizations over the finite system.
Bitset sem_actl(const FormulaPtr& f, const TransitionSystem& ts);

// Knaster-Tarski iteration on the powerset of states.
Bitset sem_mu(const FormulaPtr& f, const TransitionSystem& ts, const Valuation& v = {});

Bitset sem_pdl(const FormulaPtr& f, const TransitionSystem& ts);

// Relational program semantics: states reachable from s through r.
Bitset prog_rel(const PdlProgPtr& r, const TransitionSystem& ts, std::size_t s);

// Dispatches on the dialect.
Bitset sem(const FormulaPtr& f, Dialect d, const TransitionSystem& ts);

}  // namespace moka
