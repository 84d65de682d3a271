#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moka/bitset.hpp"

namespace moka {

using Elem = int;

// Finite lattice given as an explicit table: element ids, a decidable order
// and total join/meet operations. Joins/meets are trusted on construction and
// checked against the order by validate().
class FiniteLattice {
public:
  FiniteLattice() = default;
  FiniteLattice(std::size_t n, std::function<bool(Elem, Elem)> leq);

  std::size_t size() const { return n_; }
  bool leq(Elem a, Elem b) const { return leq_[static_cast<std::size_t>(a) * n_ + b]; }
  Elem join(Elem a, Elem b) const { return join_[static_cast<std::size_t>(a) * n_ + b]; }
  Elem meet(Elem a, Elem b) const { return meet_[static_cast<std::size_t>(a) * n_ + b]; }
  Elem bot() const { return bot_; }
  Elem top() const { return top_; }

  // Overrides a join entry; used by tests to corrupt a table before validate().
  void override_join(Elem a, Elem b, Elem v);

  std::vector<Elem> upper_bounds(Elem a, Elem b) const;

private:
  std::size_t n_ = 0;
  std::vector<char> leq_;
  std::vector<Elem> join_, meet_;
  Elem bot_ = 0, top_ = 0;

  friend FiniteLattice lattice_from_order(std::size_t, std::function<bool(Elem, Elem)>);
};

struct LatticeDiagnostics {
  bool ok = true;
  std::string law;              // first violated law, empty when ok
  std::vector<Elem> witnesses;  // elements witnessing the violation
};

// Checks the order laws and that join/meet are the least upper bound and the
// greatest lower bound; total, reports the first violation found.
LatticeDiagnostics validate_lattice(const FiniteLattice& l);

struct LfpOptions {
  std::size_t budget = 1u << 20;
};

// Kleene iteration from `seed` (bottom by default). Throws NonMonotoneError
// if an iterate strictly decreases, IterationBudgetError when the budget is
// exhausted.
Elem lfp(const std::function<Elem(Elem)>& f, const FiniteLattice& l,
         std::optional<Elem> seed = std::nullopt, LfpOptions opts = {});

struct NonMonotoneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IterationBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Galois connection between two finite powerset-like carriers, values are
// bitsets over each universe. Law checks are exhaustive over sampled pairs.
struct GaloisConnection {
  std::size_t concrete_universe = 0;
  std::size_t abstract_universe = 0;
  std::function<Bitset(const Bitset&)> alpha;
  std::function<Bitset(const Bitset&)> gamma;

  // alpha(c) <= a  iff  c <= gamma(a), over all pairs drawn from the given
  // sample sets (exhaustive when the samples enumerate the carriers).
  bool check_adjunction(const std::vector<Bitset>& cs, const std::vector<Bitset>& as) const;
};

// Direct/inverse image of a total map f : X -> Y between finite carriers.
GaloisConnection image_adjunction(const std::vector<std::size_t>& f, std::size_t y_size);

// Equivalence on a finite lattice whose classes are closed under joins of
// non-empty subsets.
class CompatibleEquivalence {
public:
  CompatibleEquivalence() = default;
  CompatibleEquivalence(const FiniteLattice* carrier, std::vector<int> class_of)
      : carrier_(carrier), class_of_(std::move(class_of)) {}

  static CompatibleEquivalence identity(const FiniteLattice& l);
  static CompatibleEquivalence total(const FiniteLattice& l);

  int class_of(Elem e) const { return class_of_[e]; }
  const FiniteLattice& carrier() const { return *carrier_; }

  // Exhaustive join-closure check of every class.
  bool validate(std::string* why = nullptr) const;

private:
  const FiniteLattice* carrier_ = nullptr;
  std::vector<int> class_of_;
};

// alpha of the equivalence adjunction: keeps the join of X's members within
// each class, at most one representative per class.
std::vector<Elem> equiv_alpha(const std::vector<Elem>& xs, const CompatibleEquivalence& sim);

// gamma of the equivalence adjunction: union of class-restricted downsets.
std::vector<Elem> equiv_gamma(const std::vector<Elem>& ys, const CompatibleEquivalence& sim);

// The order of the quotient domain: X <= Y iff every x in X has an equivalent
// y in Y above it.
bool equiv_leq(const std::vector<Elem>& x, const std::vector<Elem>& y,
               const CompatibleEquivalence& sim);

// Builds an explicit lattice from an order predicate, computing join/meet by
// scan; throws if some pair lacks a least upper bound or greatest lower bound.
FiniteLattice lattice_from_order(std::size_t n, std::function<bool(Elem, Elem)> leq);

}  // namespace moka
