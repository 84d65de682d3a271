#pragma once

#include <algorithm>
#include <vector>

#include "moka/bitset.hpp"
#include "moka/eval.hpp"
#include "moka/transition_system.hpp"

namespace moka {

// A computation path: current state plus the set of traversed states.
struct Frame {
  std::size_t current;
  Bitset trace;

  bool operator==(const Frame& o) const { return current == o.current && trace == o.trace; }
  bool operator<(const Frame& o) const {
    if (current != o.current) return current < o.current;
    return trace < o.trace;
  }
};

// Non-empty sequence of frames; front() is the top frame.
using Stack = std::vector<Frame>;

// Finite set of stacks in canonical (sorted, deduplicated) order.
class StackSet {
public:
  StackSet() = default;
  explicit StackSet(std::vector<Stack> stacks) : stacks_(std::move(stacks)) { normalize(); }

  const std::vector<Stack>& stacks() const { return stacks_; }
  bool empty() const { return stacks_.empty(); }
  std::size_t size() const { return stacks_.size(); }

  void insert(Stack s) {
    auto it = std::lower_bound(stacks_.begin(), stacks_.end(), s);
    if (it == stacks_.end() || !(*it == s)) stacks_.insert(it, std::move(s));
  }

  StackSet unite(const StackSet& o) const {
    std::vector<Stack> out;
    std::set_union(stacks_.begin(), stacks_.end(), o.stacks_.begin(), o.stacks_.end(),
                   std::back_inserter(out));
    return StackSet(std::move(out));
  }

  bool subset_of(const StackSet& o) const {
    return std::includes(o.stacks_.begin(), o.stacks_.end(), stacks_.begin(), stacks_.end());
  }

  bool operator==(const StackSet& o) const { return stacks_ == o.stacks_; }
  bool operator<(const StackSet& o) const { return stacks_ < o.stacks_; }

private:
  std::vector<Stack> stacks_;
  void normalize() {
    std::sort(stacks_.begin(), stacks_.end());
    stacks_.erase(std::unique(stacks_.begin(), stacks_.end()), stacks_.end());
  }
};

// {<s, {}> | s in X} as depth-1 stacks.
StackSet lift_states(const Bitset& states, const TransitionSystem& ts);

// Current states of the top frames.
Bitset current_states(const StackSet& s, const TransitionSystem& ts);

// Semantics of one basic expression, extended additively over the set.
// Names: "p?" / "!p?" for a proposition p, "loop?", "!loop?", "next", "add",
// "reset", "push", "pop".
StackSet eval_basic(const std::string& name, const StackSet& s, const TransitionSystem& ts);

// "<state|{trace}> :: ..." rendering, top frame first.
std::string to_string(const Stack& s, const TransitionSystem& ts);
std::string to_string(const StackSet& s, const TransitionSystem& ts);

// Carrier for evaluating commands on sets of concrete stacks.
class ConcreteStackDomain {
public:
  using Value = StackSet;
  using FrameKey = Frame;
  static constexpr bool has_frames = true;
  static constexpr bool accumulating_star = false;

  explicit ConcreteStackDomain(const TransitionSystem& ts) : ts_(&ts) {}
  const TransitionSystem& ts() const { return *ts_; }

  // stacks grow without bound, so no sound unfolding index exists
  std::optional<std::size_t> chain_bound() const { return std::nullopt; }
  // approximant chains of loop-detecting bodies plateau for up to a full
  // cycle before growing; wait out at least a system's worth of steps
  std::size_t unfold_window_hint() const { return ts_->num_states() + 2; }

  Value bottom() const { return {}; }
  Value join(const Value& a, const Value& b) const { return a.unite(b); }
  Value apply_basic(const std::string& name, const Value& v) const {
    return eval_basic(name, v, *ts_);
  }

  std::vector<FrameKey> top_keys(const Value& v) const {
    std::vector<FrameKey> out;
    for (const auto& s : v.stacks()) out.push_back(s.front());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Value from_key(const FrameKey& k) const { return StackSet({Stack{k}}); }

  // Replaces the top frame of every stack by the frames the key function
  // yields for it (its values are depth-1 stack sets).
  template <typename F>
  Value apply_per_top(const Value& v, F&& per_key) const {
    StackSet out;
    for (const auto& s : v.stacks()) {
      const Value& repl = per_key(s.front());
      for (const auto& r : repl.stacks()) {
        Stack ns;
        ns.reserve(s.size());
        ns.push_back(r.front());
        ns.insert(ns.end(), s.begin() + 1, s.end());
        out.insert(std::move(ns));
      }
    }
    return out;
  }

private:
  const TransitionSystem* ts_;
};

using ConcreteEvaluator = Evaluator<ConcreteStackDomain>;

// Powerset-of-states carrier with user-supplied basic expressions; used for
// plain lattice evaluation and in tests.
class SetDomain {
public:
  using Value = Bitset;
  static constexpr bool has_frames = false;
  static constexpr bool accumulating_star = false;

  explicit SetDomain(std::size_t universe) : universe_(universe) {}

  void define(const std::string& name, std::function<Bitset(const Bitset&)> fn) {
    basics_[name] = std::move(fn);
  }

  Value bottom() const { return Bitset(universe_); }
  Value join(const Value& a, const Value& b) const { return a | b; }
  Value apply_basic(const std::string& name, const Value& v) const {
    auto it = basics_.find(name);
    if (it == basics_.end()) throw UnknownBasicError("UnknownBasic: " + name);
    return it->second(v);
  }

  // height of the lattice of functions P(U) -> P(U): every strict growth
  // raises one of the |U| bits of one of the 2^|U| outputs
  std::optional<std::size_t> chain_bound() const {
    if (universe_ > 16) return std::nullopt;
    return universe_ * (std::size_t{1} << universe_);
  }
  std::size_t unfold_window_hint() const { return universe_ + 2; }

private:
  std::size_t universe_;
  std::map<std::string, std::function<Bitset(const Bitset&)>> basics_;
};

}  // namespace moka
