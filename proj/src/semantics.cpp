#include "moka/semantics.hpp"

#include <functional>
#include <vector>

namespace moka {

namespace {

// {s | post(s) subseteq xs}
Bitset ax_states(const Bitset& xs, const TransitionSystem& ts) {
  Bitset out(ts.num_states());
  for (std::size_t s = 0; s < ts.num_states(); ++s)
    if (ts.successors(s).subset_of(xs)) out.set(s);
  return out;
}

Bitset lfp_sets(const std::function<Bitset(const Bitset&)>& f, std::size_t n) {
  Bitset x(n);
  while (true) {
    Bitset y = f(x);
    if (y == x) return x;
    x = y;
  }
}

Bitset gfp_sets(const std::function<Bitset(const Bitset&)>& f, std::size_t n) {
  Bitset x = Bitset::full(n);
  while (true) {
    Bitset y = f(x);
    if (y == x) return x;
    x = y;
  }
}

}  // namespace

Bitset sem_actl(const FormulaPtr& f, const TransitionSystem& ts) {
  const std::size_t n = ts.num_states();
  switch (f->kind) {
    case Formula::Kind::True: return Bitset::full(n);
    case Formula::Kind::False: return Bitset(n);
    case Formula::Kind::Atom: return ts.prop_states(f->name);
    case Formula::Kind::NegAtom: return Bitset::full(n) - ts.prop_states(f->name);
    case Formula::Kind::And: return sem_actl(f->lhs, ts) & sem_actl(f->rhs, ts);
    case Formula::Kind::Or: return sem_actl(f->lhs, ts) | sem_actl(f->rhs, ts);
    case Formula::Kind::AX: return ax_states(sem_actl(f->lhs, ts), ts);
    case Formula::Kind::AF: {
      Bitset g = sem_actl(f->lhs, ts);
      return lfp_sets([&](const Bitset& x) { return g | ax_states(x, ts); }, n);
    }
    case Formula::Kind::AG: {
      Bitset g = sem_actl(f->lhs, ts);
      return gfp_sets([&](const Bitset& x) { return g & ax_states(x, ts); }, n);
    }
    case Formula::Kind::AU: {
      Bitset g1 = sem_actl(f->lhs, ts);
      Bitset g2 = sem_actl(f->rhs, ts);
      return lfp_sets([&](const Bitset& x) { return g2 | (g1 & ax_states(x, ts)); }, n);
    }
    default: throw FormulaError("not an ACTL formula");
  }
}

Bitset sem_mu(const FormulaPtr& f, const TransitionSystem& ts, const Valuation& v) {
  const std::size_t n = ts.num_states();
  switch (f->kind) {
    case Formula::Kind::True: return Bitset::full(n);
    case Formula::Kind::False: return Bitset(n);
    case Formula::Kind::Atom: return ts.prop_states(f->name);
    case Formula::Kind::NegAtom: return Bitset::full(n) - ts.prop_states(f->name);
    case Formula::Kind::And: return sem_mu(f->lhs, ts, v) & sem_mu(f->rhs, ts, v);
    case Formula::Kind::Or: return sem_mu(f->lhs, ts, v) | sem_mu(f->rhs, ts, v);
    case Formula::Kind::Box: return ax_states(sem_mu(f->lhs, ts, v), ts);
    case Formula::Kind::Var: {
      auto it = v.find(f->name);
      if (it == v.end()) throw UnboundLogicVarError("UnboundLogicVar: " + f->name);
      return it->second;
    }
    case Formula::Kind::Mu:
      return lfp_sets(
          [&](const Bitset& x) {
            Valuation v2 = v;
            v2[f->name] = x;
            return sem_mu(f->lhs, ts, v2);
          },
          n);
    case Formula::Kind::Nu:
      return gfp_sets(
          [&](const Bitset& x) {
            Valuation v2 = v;
            v2[f->name] = x;
            return sem_mu(f->lhs, ts, v2);
          },
          n);
    default: throw FormulaError("not a box-fragment formula");
  }
}

Bitset prog_rel(const PdlProgPtr& r, const TransitionSystem& ts, std::size_t s) {
  const std::size_t n = ts.num_states();
  switch (r->kind) {
    case PdlProg::Kind::Next: return ts.successors(s);
    case PdlProg::Kind::Seq: {
      Bitset mid = prog_rel(r->lhs, ts, s);
      Bitset out(n);
      mid.for_each([&](std::size_t m) { out |= prog_rel(r->rhs, ts, m); });
      return out;
    }
    case PdlProg::Kind::Choice: return prog_rel(r->lhs, ts, s) | prog_rel(r->rhs, ts, s);
    case PdlProg::Kind::Star: {
      Bitset reach(n);
      reach.set(s);
      while (true) {
        Bitset next = reach;
        reach.for_each([&](std::size_t m) { next |= prog_rel(r->lhs, ts, m); });
        if (next == reach) return reach;
        reach = next;
      }
    }
    case PdlProg::Kind::Test: {
      Bitset out(n);
      if (sem_pdl(r->body, ts).test(s)) out.set(s);
      return out;
    }
  }
  throw FormulaError("unreachable");
}

Bitset sem_pdl(const FormulaPtr& f, const TransitionSystem& ts) {
  const std::size_t n = ts.num_states();
  switch (f->kind) {
    case Formula::Kind::True: return Bitset::full(n);
    case Formula::Kind::False: return Bitset(n);
    case Formula::Kind::Atom: return ts.prop_states(f->name);
    case Formula::Kind::NegAtom: return Bitset::full(n) - ts.prop_states(f->name);
    case Formula::Kind::And: return sem_pdl(f->lhs, ts) & sem_pdl(f->rhs, ts);
    case Formula::Kind::Or: return sem_pdl(f->lhs, ts) | sem_pdl(f->rhs, ts);
    case Formula::Kind::PdlBox: {
      Bitset g = sem_pdl(f->lhs, ts);
      Bitset out(n);
      for (std::size_t s = 0; s < n; ++s)
        if (prog_rel(f->prog, ts, s).subset_of(g)) out.set(s);
      return out;
    }
    case Formula::Kind::PdlDiamond: {
      Bitset g = sem_pdl(f->lhs, ts);
      Bitset out(n);
      for (std::size_t s = 0; s < n; ++s)
        if (!(prog_rel(f->prog, ts, s) & g).empty()) out.set(s);
      return out;
    }
    default: throw FormulaError("not a PDL formula");
  }
}

Bitset sem(const FormulaPtr& f, Dialect d, const TransitionSystem& ts) {
  switch (d) {
    case Dialect::Actl: return sem_actl(f, ts);
    case Dialect::Mu: return sem_mu(f, ts);
    case Dialect::Pdl: return sem_pdl(f, ts);
  }
  throw FormulaError("unreachable");
}

}  // namespace moka
