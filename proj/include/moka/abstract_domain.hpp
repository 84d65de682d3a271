#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "moka/abstraction.hpp"
#include "moka/eval.hpp"
#include "moka/formula.hpp"
#include "moka/stacks.hpp"

namespace moka {

struct AbstractFrame {
  Elem sigma, delta;
  bool operator==(const AbstractFrame&) const = default;
  auto operator<=>(const AbstractFrame&) const = default;
};

using AbstractStack = std::vector<AbstractFrame>;  // front() is the top frame

// Canonical set of abstract stacks: at most one representative per
// equivalence class; maintained by the domain operations.
class AbstractStackSet {
public:
  AbstractStackSet() = default;

  const std::vector<AbstractStack>& stacks() const { return stacks_; }
  bool empty() const { return stacks_.empty(); }
  std::size_t size() const { return stacks_.size(); }

  void insert_raw(AbstractStack s) {
    auto it = std::lower_bound(stacks_.begin(), stacks_.end(), s);
    if (it == stacks_.end() || !(*it == s)) stacks_.insert(it, std::move(s));
  }
  void remove(const AbstractStack& s) {
    auto it = std::lower_bound(stacks_.begin(), stacks_.end(), s);
    if (it != stacks_.end() && *it == s) stacks_.erase(it);
  }

  bool operator==(const AbstractStackSet& o) const { return stacks_ == o.stacks_; }
  bool operator<(const AbstractStackSet& o) const { return stacks_ < o.stacks_; }

private:
  std::vector<AbstractStack> stacks_;
};

enum class BcaMode {
  Closed,   // published closed forms; state-level best approximation for next
  Generic,  // best correct approximation computed from the concretization
};

// The stack abstraction induced by a state abstraction and a compatible
// equivalence on it, together with the abstract meaning of the basic
// expressions.
class AbstractStackDomain {
public:
  using Value = AbstractStackSet;
  using FrameKey = AbstractFrame;
  static constexpr bool has_frames = true;
  static constexpr bool accumulating_star = true;

  AbstractStackDomain(const TransitionSystem& ts, const StateAbstraction& dom,
                      const FrameEquivalence& sim, BcaMode mode = BcaMode::Generic);

  const TransitionSystem& ts() const { return *ts_; }
  std::optional<std::size_t> chain_bound() const { return std::nullopt; }
  std::size_t unfold_window_hint() const { return ts_->num_states() + 2; }
  const StateAbstraction& state_abstraction() const { return *dom_; }
  const FrameEquivalence& equivalence() const { return *sim_; }
  BcaMode mode() const { return mode_; }

  Value bottom() const { return {}; }
  Value join(const Value& a, const Value& b) const;
  Value apply_basic(const std::string& name, const Value& v) const;

  std::vector<FrameKey> top_keys(const Value& v) const;
  Value from_key(const FrameKey& k) const;
  template <typename F>
  Value apply_per_top(const Value& v, F&& per_key) const {
    Value out;
    for (const auto& s : v.stacks()) {
      const Value& repl = per_key(s.front());
      for (const auto& r : repl.stacks()) {
        AbstractStack ns;
        ns.reserve(s.size());
        ns.push_back(r.front());
        ns.insert(ns.end(), s.begin() + 1, s.end());
        canonical_insert(out, std::move(ns));
      }
    }
    return out;
  }

  // Inserts a stack, joining it with an existing equivalent representative.
  void canonical_insert(Value& v, AbstractStack s) const;
  Value canonicalize(const std::vector<AbstractStack>& stacks) const;

  bool equivalent(const AbstractStack& a, const AbstractStack& b) const;
  bool stack_leq(const Value& a, const Value& b) const;  // the quotient order

  // States whose singleton abstraction is equivalent to and below e; the
  // concretization of e as a frame component.
  const std::vector<std::size_t>& realizable(Elem e) const;
  Elem realizable_join(Elem e) const;
  Elem singleton_alpha(std::size_t state) const { return singleton_alpha_[state]; }

  // alpha of the state-level successor map, used as the abstract next.
  Elem next_closed(Elem e) const;

  std::string render(const Value& v) const;

private:
  const TransitionSystem* ts_;
  const StateAbstraction* dom_;
  const FrameEquivalence* sim_;
  BcaMode mode_;
  std::vector<Elem> singleton_alpha_;
  mutable std::mutex mu_;
  mutable std::map<Elem, std::vector<std::size_t>> realizable_cache_;
  mutable std::map<Elem, Elem> next_cache_;

  Value bca(const std::string& name, const Value& v, BcaMode mode) const;

public:
  Value bca_basic(const std::string& name, const Value& v, BcaMode mode) const {
    return bca(name, v, mode);
  }
};

// Pointwise abstraction followed by the equivalence quotient.
AbstractStackSet stack_alpha(const StackSet& s, const AbstractStackDomain& dom);

// Concrete stacks below some representative; feasible sizes only (the trace
// concretization enumerates subsets).
StackSet stack_gamma(const AbstractStackSet& t, const AbstractStackDomain& dom);

// eval of a compiled program over the abstract carrier.
AbstractStackSet eval_abstract(const TermPtr& program, const AbstractStackSet& input,
                               const AbstractStackDomain& dom, EvalOptions opts = {});

struct AbstractVerdict {
  bool proved = false;
  AbstractStackSet output;
  Bitset candidates;  // concretized current states of the surviving stacks
};

AbstractVerdict check_abstract(const FormulaPtr& f, Dialect dialect, const TransitionSystem& ts,
                               const StateAbstraction& dom, const FrameEquivalence& sim,
                               const Bitset& init, BcaMode mode = BcaMode::Generic,
                               EvalOptions opts = {});

}  // namespace moka
