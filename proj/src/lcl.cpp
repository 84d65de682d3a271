#include "moka/lcl.hpp"

#include <set>
#include <sstream>

#include "json.hpp"

namespace moka {

using nlohmann::json;

namespace {

StackSet eval_concrete(const TermPtr& t, const StackSet& s, const AbstractStackDomain& dom,
                       const EvalOptions& opts) {
  ConcreteStackDomain cd(dom.ts());
  ConcreteEvaluator ev(cd, opts);
  return ev.eval(t, s);
}

AbstractStackSet abstract_of_concrete_run(const TermPtr& t, const StackSet& pre,
                                          const AbstractStackDomain& dom,
                                          const EvalOptions& opts) {
  return stack_alpha(eval_concrete(t, pre, dom, opts), dom);
}

Bitset tops_gamma(const AbstractStackSet& v, const AbstractStackDomain& dom) {
  Bitset out(dom.ts().num_states());
  for (const auto& s : v.stacks()) out |= dom.state_abstraction().gamma(s.front().sigma);
  return out;
}

// Local completeness is checked on the top-frame projection. Every basic
// expression acts on the top frame only, so nothing below it can influence a
// run; comparing whole stacks would additionally demand that the abstraction
// keeps the correlation between a frame and the stack beneath it, which no
// state-level domain can express and no repair could restore.
StackSet top_projection(const StackSet& s) {
  StackSet out;
  for (const auto& st : s.stacks()) out.insert(Stack{st.front()});
  return out;
}

std::optional<ObligationFailure> check_obligation(const TermPtr& t, const StackSet& pre,
                                                  const AbstractStackDomain& dom,
                                                  const EvalOptions& opts) {
  StackSet tops = top_projection(pre);
  StackSet widened = stack_gamma(stack_alpha(tops, dom), dom);
  AbstractStackSet lhs =
      stack_alpha(top_projection(eval_concrete(t, tops, dom, opts)), dom);
  AbstractStackSet rhs =
      stack_alpha(top_projection(eval_concrete(t, widened, dom, opts)), dom);
  if (lhs == rhs) return std::nullopt;
  ObligationFailure f;
  f.expr = to_string(t);
  f.pre = pre;
  f.lhs = lhs;
  f.rhs = rhs;
  Bitset a = tops_gamma(lhs, dom), b = tops_gamma(rhs, dom);
  f.witnesses = (a | b) - (a & b);
  return f;
}

}  // namespace

std::optional<ObligationFailure> is_locally_complete(const std::string& basic,
                                                     const StackSet& pre,
                                                     const AbstractStackDomain& dom) {
  return check_obligation(Term::basic(basic), pre, dom, {});
}

TripleReport validate_triple(const Triple& t, const AbstractStackDomain& dom, EvalOptions opts) {
  StackSet reach = eval_concrete(t.program, t.pre, dom, opts);
  if (!t.post.subset_of(reach))
    return {false, "under-approximation", "postcondition exceeds the reachable stacks"};
  if (!(stack_alpha(t.post, dom) == stack_alpha(reach, dom)))
    return {false, "abstraction-equality",
            "abstraction of the postcondition differs from the reachable stacks"};
  if (auto fail = check_obligation(t.program, t.pre, dom, opts))
    return {false, "local-completeness", "program not locally complete on the precondition"};
  return {};
}

TripleReport validate_proof(const ProofNode& root, const AbstractStackDomain& dom,
                            EvalOptions opts) {
  TripleReport r = validate_triple({root.pre, root.program, root.post}, dom, opts);
  if (!r.ok) {
    r.detail += " [rule " + root.rule + " on " + to_string(root.program) + "]";
    return r;
  }
  for (const auto& c : root.children) {
    TripleReport cr = validate_proof(c, dom, opts);
    if (!cr.ok) return cr;
  }
  return {};
}

// --- derivation ---

namespace {

struct Deriver {
  const AbstractStackDomain& dom;
  DeriveOptions opts;

  std::optional<ObligationFailure> failure;

  std::optional<ProofNode> go(const TermPtr& t, const StackSet& pre) {
    switch (t->kind) {
      case Term::Kind::One:
      case Term::Kind::Zero:
      case Term::Kind::Basic: return transfer(t, pre);
      case Term::Kind::Seq: {
        auto a = go(t->lhs, pre);
        if (!a) return std::nullopt;
        auto b = go(t->rhs, a->post);
        if (!b) return std::nullopt;
        ProofNode n{"seq", pre, b->post, t, {std::move(*a), std::move(*b)}, {}, {}, {}, ""};
        return n;
      }
      case Term::Kind::Choice: {
        auto a = go(t->lhs, pre);
        if (!a) return std::nullopt;
        auto b = go(t->rhs, pre);
        if (!b) return std::nullopt;
        StackSet post = a->post.unite(b->post);
        ProofNode n{"join", pre, std::move(post), t, {std::move(*a), std::move(*b)},
                    {}, {}, {}, ""};
        return n;
      }
      case Term::Kind::Star: return star(t, pre);
      case Term::Kind::Mu: return mu(t, pre);
      case Term::Kind::MuApprox: return mu_approx(t, pre);
      case Term::Kind::Var:
        throw LclError("cannot derive a triple for an open program: " + to_string(t));
    }
    return std::nullopt;
  }

  std::optional<ProofNode> transfer(const TermPtr& t, const StackSet& pre) {
    if (auto fail = check_obligation(t, pre, dom, opts.eval)) {
      failure = std::move(fail);
      return std::nullopt;
    }
    StackSet post = eval_concrete(t, pre, dom, opts.eval);
    ProofNode n{"transfer", pre, std::move(post), t, {}, {}, {}, {}, ""};
    n.obligation_lhs = abstract_of_concrete_run(t, pre, dom, opts.eval);
    n.obligation_rhs = n.obligation_lhs;
    return n;
  }

  // (iterate) when the frontier stays within gamma(alpha(accumulated)),
  // otherwise one (rec) unroll; repeats within the budget.
  std::optional<ProofNode> star(const TermPtr& t, const StackSet& pre) {
    StackSet w = pre;
    std::vector<ProofNode> unrolls;
    for (std::size_t round = 0; round <= opts.budget; ++round) {
      auto body = go(t->lhs, w);
      if (!body) return std::nullopt;
      StackSet frontier = body->post;
      StackSet widened = stack_gamma(stack_alpha(w, dom), dom);
      if (frontier.subset_of(widened)) {
        ProofNode it{"iterate", w, w.unite(frontier), t, {std::move(*body)}, {}, {}, {}, ""};
        ProofNode acc = std::move(it);
        for (auto itr = unrolls.rbegin(); itr != unrolls.rend(); ++itr) {
          ProofNode rec{"rec", itr->pre, acc.post, t, {}, {}, {}, {}, ""};
          rec.children.push_back(std::move(*itr));
          rec.children.push_back(std::move(acc));
          acc = std::move(rec);
        }
        return acc;
      }
      StackSet next_w = w.unite(frontier);
      unrolls.push_back(std::move(*body));
      w = std::move(next_w);
    }
    throw BudgetExceededError("BudgetExceeded: star unrolling at " + to_string(t));
  }

  std::optional<ProofNode> mu(const TermPtr& t, const StackSet& pre) {
    AbstractStackSet alpha_pre = stack_alpha(pre, dom);
    Evaluator<AbstractStackDomain> ev(dom, opts.eval);
    AbstractStackSet full = ev.eval(t, alpha_pre);

    int n = -1;
    if (opts.afix_n) {
      n = *opts.afix_n;
      Evaluator<AbstractStackDomain> evn(dom, opts.eval);
      if (!(evn.eval(approximant(t, n), alpha_pre) == full))
        throw LclError("afix side condition fails at the requested index");
    } else {
      for (std::size_t k = 0; k <= opts.budget; ++k) {
        Evaluator<AbstractStackDomain> evk(dom, opts.eval);
        if (evk.eval(approximant(t, static_cast<int>(k)), alpha_pre) == full) {
          n = static_cast<int>(k);
          break;
        }
      }
      if (n < 0)
        throw BudgetExceededError("BudgetExceeded: approximant search at " + to_string(t));
    }

    auto child = mu_approx(approximant(t, n), pre);
    if (!child) return std::nullopt;
    ProofNode node{"afix", pre, child->post, t, {std::move(*child)}, {}, {}, n, ""};
    node.note = "approximant " + std::to_string(n) + " matches the abstract fixpoint";
    return node;
  }

  std::optional<ProofNode> mu_approx(const TermPtr& t, const StackSet& pre) {
    if (t->approx <= 0) {
      ProofNode n{"mu0", pre, StackSet{}, t, {}, {}, {}, {}, ""};
      return n;
    }
    TermPtr unfolded =
        substitute(t->lhs, t->name, Term::mu_approx(t->name, t->approx - 1, t->lhs));
    auto child = go(unfolded, pre);
    if (!child) return std::nullopt;
    ProofNode n{"mu-plus", pre, child->post, t, {std::move(*child)}, {}, {}, {}, ""};
    return n;
  }
};

}  // namespace

DeriveResult derive(const TermPtr& program, const StackSet& pre, const AbstractStackDomain& dom,
                    DeriveOptions opts) {
  Deriver d{dom, opts, std::nullopt};
  auto proof = d.go(program, pre);
  if (proof) return std::move(*proof);
  if (d.failure) return std::move(*d.failure);
  throw LclError("derivation failed without a recorded obligation");
}

// --- repair ---

namespace {

// state-level action of the expressions the repair formula supports
std::optional<Bitset> state_action(const std::string& expr, const Bitset& states,
                                   const TransitionSystem& ts) {
  if (expr == "next") return ts.post(states);
  if (!expr.empty() && expr.back() == '?' && expr != "loop?" && expr != "!loop?")
    return states & ts.prop_states(expr.substr(0, expr.size() - 1));
  return std::nullopt;
}

}  // namespace

std::shared_ptr<StateAbstraction> repair(const StateAbstraction& dom, const TransitionSystem& ts,
                                         const std::string& expr, const StackSet& pre) {
  Bitset phat = current_states(pre, ts);
  auto image = state_action(expr, phat, ts);
  if (!image)
    throw LclError("repair supports next and proposition tests, got: " + expr);

  Bitset widened = dom.gamma(dom.alpha(phat));
  // nothing to repair when the state-level obligation already holds
  if (dom.alpha(*state_action(expr, widened, ts)) == dom.alpha(*image))
    throw NoStrictRefinementError("NoStrictRefinement: the obligation already holds");

  Bitset r = phat;
  widened.for_each([&](std::size_t s) {
    Bitset single(ts.num_states());
    single.set(s);
    auto img = state_action(expr, single, ts);
    if (img->subset_of(*image)) r.set(s);
  });

  // already expressible: the repair cannot make progress here
  if (dom.gamma(dom.alpha(r)) == r)
    throw NoStrictRefinementError("NoStrictRefinement: the repair point is already in the family");

  // the family is closed already, so its closure with r is a single pass of
  // intersections against r
  std::vector<Bitset> family = dom.all_gammas();
  std::vector<std::pair<std::string, Bitset>> named;
  named.reserve(2 * family.size() + 1);
  bool enumerable = family.size() <= 4096;
  for (std::size_t i = 0; i < family.size(); ++i)
    named.emplace_back(enumerable ? dom.element_name(static_cast<Elem>(i)) : std::string{},
                       family[i]);
  named.emplace_back(std::string{}, r);
  for (const auto& g : family) named.emplace_back(std::string{}, g & r);

  std::vector<std::string> point_names(ts.num_states());
  for (std::size_t s = 0; s < ts.num_states(); ++s) point_names[s] = ts.name(s);
  return std::make_shared<MooreTableAbstraction>(ts.num_states(), std::move(named),
                                                 MooreTableAbstraction::Closure::Trust,
                                                 std::move(point_names));
}

std::vector<Bitset> family_difference(const StateAbstraction& before,
                                      const StateAbstraction& after) {
  auto old_sets = before.all_gammas();
  std::set<Bitset> old_index(old_sets.begin(), old_sets.end());
  std::vector<Bitset> added;
  for (const auto& g : after.all_gammas())
    if (!old_index.count(g)) added.push_back(g);
  std::sort(added.begin(), added.end());
  return added;
}

RepairLoopResult verify_with_repair_loop(const FormulaPtr& f, Dialect dialect,
                                         const TransitionSystem& ts, const StateAbstraction& dom,
                                         const FrameEquivalence& sim, const Bitset& init,
                                         std::size_t budget, DeriveOptions opts) {
  TermPtr program = encode(f, dialect);
  StackSet pre = lift_states(init, ts);

  RepairLoopResult result;
  result.counterexamples = Bitset(ts.num_states());
  const StateAbstraction* current = &dom;
  std::shared_ptr<StateAbstraction> owned;

  for (std::size_t round = 0; round <= budget; ++round) {
    DeriveResult r = ObligationFailure{};
    try {
      AbstractStackDomain adom(ts, *current, sim, BcaMode::Generic);
      r = derive(program, pre, adom, opts);
    } catch (const std::runtime_error&) {
      // a repair may leave the domain outside the equivalence's reach or the
      // derivation may exhaust its budget; both end the loop honestly
      if (round == 0) throw;
      break;
    }
    if (auto* proof = std::get_if<ProofNode>(&r)) {
      result.proof = std::move(*proof);
      result.counterexamples = current_states(result.proof->post, ts);
      result.status = result.counterexamples.empty() ? RepairLoopResult::Status::Proved
                                                     : RepairLoopResult::Status::Refuted;
      result.final_domain = owned;
      return result;
    }
    auto fail = std::get<ObligationFailure>(std::move(r));
    result.last_failure = fail;
    if (round == budget) break;
    try {
      // the failing expression is a basic one; recover its name
      auto next_dom = repair(*current, ts, fail.expr, fail.pre);
      auto added = family_difference(*current, *next_dom);
      result.added_elements.insert(result.added_elements.end(), added.begin(), added.end());
      owned = std::move(next_dom);
      current = owned.get();
      ++result.repairs;
    } catch (const LclError&) {
      break;
    }
  }
  result.status = RepairLoopResult::Status::OutOfBudget;
  result.final_domain = owned;
  return result;
}

// --- rendering ---

namespace {

json stacks_json(const StackSet& s, const TransitionSystem& ts) {
  json out = json::array();
  for (const auto& st : s.stacks()) out.push_back(to_string(st, ts));
  return out;
}

json node_json(const ProofNode& n, const AbstractStackDomain& dom) {
  json j;
  j["rule"] = n.rule;
  j["program"] = to_string(n.program);
  j["pre"] = stacks_json(n.pre, dom.ts());
  j["post"] = stacks_json(n.post, dom.ts());
  if (n.afix_n) j["approximant"] = *n.afix_n;
  if (n.obligation_lhs) j["obligation"] = dom.render(*n.obligation_lhs);
  if (!n.note.empty()) j["note"] = n.note;
  json kids = json::array();
  for (const auto& c : n.children) kids.push_back(node_json(c, dom));
  if (!kids.empty()) j["children"] = kids;
  return j;
}

std::string states_text(const Bitset& b, const TransitionSystem& ts) {
  std::string out = "{";
  bool first = true;
  b.for_each([&](std::size_t s) {
    if (!first) out += ",";
    out += ts.name(s);
    first = false;
  });
  return out + "}";
}

void node_text(const ProofNode& n, const AbstractStackDomain& dom, int depth,
               std::string& out) {
  out.append(static_cast<std::size_t>(2 * depth), ' ');
  out += "(" + n.rule + ") [" + states_text(current_states(n.pre, dom.ts()), dom.ts()) + "] " +
         to_string(n.program) + " [" + states_text(current_states(n.post, dom.ts()), dom.ts()) +
         "]";
  if (n.afix_n) out += "  n=" + std::to_string(*n.afix_n);
  out += "\n";
  for (const auto& c : n.children) node_text(c, dom, depth + 1, out);
}

}  // namespace

std::string proof_to_text(const ProofNode& root, const AbstractStackDomain& dom) {
  std::string out;
  node_text(root, dom, 0, out);
  return out;
}

std::string proof_to_json(const ProofNode& root, const AbstractStackDomain& dom) {
  return node_json(root, dom).dump(2);
}

}  // namespace moka
