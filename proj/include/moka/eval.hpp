#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "moka/term.hpp"

namespace moka {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnboundVariableError : EvalError {
  using EvalError::EvalError;
};
struct UnknownBasicError : EvalError {
  using EvalError::EvalError;
};
struct UnfoldBudgetError : EvalError {
  using EvalError::EvalError;
};
struct NonFrameLocalError : EvalError {
  using EvalError::EvalError;
};

enum class FixpointStrategy {
  Auto,            // per-frame memoization when the body allows it, else unfolding
  FrameLocalMemo,  // per-frame memoization, error on non-local bodies
  BoundedUnfold,   // value-level approximant unfolding with a budget
};

struct EvalStats {
  int max_star_applications = 0;  // body applications of the largest star run
  int max_mu_passes = 0;          // stabilization passes of the largest fixpoint solve
};

struct EvalOptions {
  FixpointStrategy strategy = FixpointStrategy::Auto;
  std::size_t unfold_limit = 1u << 20;
  std::size_t unfold_window = 0;  // 0: ask the domain for a stability window
  EvalStats* stats = nullptr;
};

// Denotational evaluator for regular commands over a complete-lattice domain.
// The domain supplies bottom/join/compare and the meaning of basic
// expressions; stack-shaped domains additionally expose per-top-frame
// application, which enables the memoized fixpoint strategy.
template <typename D>
class Evaluator {
public:
  using Value = typename D::Value;
  using Env = std::map<std::string, std::function<Value(const Value&)>>;

  Evaluator(const D& dom, EvalOptions opts = {}, Env env = {})
      : dom_(dom), opts_(opts), env_(std::move(env)) {}

  Value eval(const TermPtr& t, const Value& v) {
    switch (t->kind) {
      case Term::Kind::One: return v;
      case Term::Kind::Zero: return dom_.bottom();
      case Term::Kind::Basic: return dom_.apply_basic(t->name, v);
      case Term::Kind::Seq: return eval(t->rhs, eval(t->lhs, v));
      case Term::Kind::Choice: return dom_.join(eval(t->lhs, v), eval(t->rhs, v));
      case Term::Kind::Var: {
        auto it = env_.find(t->name);
        if (it == env_.end()) throw UnboundVariableError("UnboundVariable: " + t->name);
        // copy: the body evaluation may rebind the hosting environment slot
        auto fn = it->second;
        return fn(v);
      }
      case Term::Kind::Star: return eval_star(t, v);
      case Term::Kind::Mu: return eval_mu(t, v);
      case Term::Kind::MuApprox: return eval_mu_approx(t, t->approx, v);
    }
    throw EvalError("unreachable");
  }

private:
  const D& dom_;
  EvalOptions opts_;
  Env env_;
  std::map<std::pair<TermPtr, Value>, Value> mu_cache_;  // closed fixpoints only
  std::map<std::tuple<TermPtr, int, Value>, Value> approx_cache_;
  std::map<const Term*, bool> closed_;

  bool is_closed(const TermPtr& t) {
    auto it = closed_.find(t.get());
    if (it != closed_.end()) return it->second;
    bool c = free_vars(t).empty();
    closed_.emplace(t.get(), c);
    return c;
  }

  // Join of powers with cycle detection on the power chain; exact for
  // arbitrary (also non-additive) monotone basics on finite carriers.
  // Domains that declare an accumulating star instead iterate
  // T, T v r(T), ... to stability, which is equivalent for additive
  // semantics and is the iteration the abstract carrier uses.
  Value eval_star(const TermPtr& t, const Value& v) {
    int apps = 0;
    Value acc = v;
    if constexpr (D::accumulating_star) {
      while (true) {
        Value next = dom_.join(acc, eval(t->lhs, acc));
        ++apps;
        if (next == acc) break;
        acc = std::move(next);
      }
    } else {
      Value p = v;
      std::set<Value> seen{v};
      while (true) {
        p = eval(t->lhs, p);
        ++apps;
        if (seen.count(p)) break;
        seen.insert(p);
        acc = dom_.join(acc, p);
      }
    }
    if (opts_.stats && apps > opts_.stats->max_star_applications)
      opts_.stats->max_star_applications = apps;
    return acc;
  }

  Value eval_mu(const TermPtr& t, const Value& v) {
    bool cacheable = is_closed(t);
    if (cacheable) {
      auto it = mu_cache_.find({t, v});
      if (it != mu_cache_.end()) return it->second;
    }
    Value result = dom_.bottom();
    bool local = frame_local(t->lhs);
    switch (opts_.strategy) {
      case FixpointStrategy::Auto:
        result = (D::has_frames && local) ? mu_memo(t, v) : mu_unfold(t, v);
        break;
      case FixpointStrategy::FrameLocalMemo:
        if (!(D::has_frames && local))
          throw NonFrameLocalError("NonFrameLocalBody: " + to_string(t));
        result = mu_memo(t, v);
        break;
      case FixpointStrategy::BoundedUnfold: result = mu_unfold(t, v); break;
    }
    if (cacheable) mu_cache_.emplace(std::make_pair(t, v), result);
    return result;
  }

  // Approximant chain at the input value. When the domain can bound the
  // height of its function lattice the chain provably stabilizes there and
  // the approximant at the bound is the fixpoint; otherwise the chain is
  // followed until it stays unchanged for two steps, within the budget.
  Value mu_unfold(const TermPtr& t, const Value& v) {
    if (auto bound = dom_.chain_bound()) {
      if (*bound + 1 <= opts_.unfold_limit)
        return eval_mu_approx(t, static_cast<int>(*bound + 1), v);
      throw UnfoldBudgetError("UnfoldBudgetExceeded: " + to_string(t));
    }
    std::size_t window = opts_.unfold_window ? opts_.unfold_window : dom_.unfold_window_hint();
    Value prev = dom_.bottom();  // the 0-th approximant
    std::size_t stable = 0;
    for (std::size_t n = 1; n <= opts_.unfold_limit; ++n) {
      Value cur = eval_mu_approx(t, static_cast<int>(n), v);
      if (cur == prev) {
        if (++stable >= window) return cur;
      } else {
        stable = 0;
        prev = cur;
      }
    }
    throw UnfoldBudgetError("UnfoldBudgetExceeded: " + to_string(t));
  }

  Value eval_mu_approx(const TermPtr& node, int n, const Value& v) {
    if (n <= 0) return dom_.bottom();
    bool cacheable = is_closed(node);
    auto key = std::make_tuple(node, n, v);
    if (cacheable) {
      auto it = approx_cache_.find(key);
      if (it != approx_cache_.end()) return it->second;
    }
    auto saved = save_env(node->name);
    env_[node->name] = [this, node, n](const Value& w) {
      return eval_mu_approx(node, n - 1, w);
    };
    Value out = eval(node->lhs, v);
    restore_env(node->name, saved);
    if (cacheable) approx_cache_.emplace(key, out);
    return out;
  }

  // Chaotic iteration of the per-top-frame equation system. Sound and exact
  // for frame-local bodies: such commands act on the top frame only, so the
  // function-space fixpoint factors through frame keys.
  Value mu_memo(const TermPtr& t, const Value& v) {
    if constexpr (!D::has_frames) {
      throw NonFrameLocalError("domain does not expose frames");
    } else {
      using Key = typename D::FrameKey;
      std::map<Key, Value> table;
      std::vector<Key> order;
      auto ensure = [&](const Key& k) {
        if (table.emplace(k, dom_.bottom()).second) order.push_back(k);
      };
      for (const auto& k : dom_.top_keys(v)) ensure(k);

      auto saved = save_env(t->name);
      env_[t->name] = [&](const Value& w) {
        return dom_.apply_per_top(w, [&](const Key& k) -> const Value& {
          ensure(k);
          return table.at(k);
        });
      };

      int passes = 0;
      bool changed = true;
      while (changed) {
        changed = false;
        ++passes;
        for (std::size_t i = 0; i < order.size(); ++i) {
          Value nv = eval(t->lhs, dom_.from_key(order[i]));
          Value& slot = table.at(order[i]);
          if (!(nv == slot)) {
            slot = std::move(nv);
            changed = true;
          }
        }
      }
      if (opts_.stats && passes > opts_.stats->max_mu_passes) opts_.stats->max_mu_passes = passes;

      Value out = dom_.apply_per_top(v, [&](const Key& k) -> const Value& {
        ensure(k);
        return table.at(k);
      });
      restore_env(t->name, saved);
      return out;
    }
  }

  std::optional<std::function<Value(const Value&)>> save_env(const std::string& name) {
    auto it = env_.find(name);
    if (it == env_.end()) return std::nullopt;
    return it->second;
  }
  void restore_env(const std::string& name,
                   const std::optional<std::function<Value(const Value&)>>& saved) {
    if (saved)
      env_[name] = *saved;
    else
      env_.erase(name);
  }
};

}  // namespace moka
