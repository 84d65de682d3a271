#include "moka/encode.hpp"

namespace moka {

namespace {

TermPtr test_for(const std::string& prop, bool positive) {
  return Term::basic((positive ? "" : "!") + prop + "?");
}

std::string term_var(const std::string& logic_var) {
  std::string v = logic_var;
  v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
  return "V_" + v;
}

TermPtr enc(const FormulaPtr& f, bool instrumented);

TermPtr enc_examples(const FormulaPtr& f);

TermPtr enc_prog(const PdlProgPtr& r) {
  switch (r->kind) {
    case PdlProg::Kind::Next: return Term::basic("next");
    case PdlProg::Kind::Seq: return Term::seq(enc_prog(r->lhs), enc_prog(r->rhs));
    case PdlProg::Kind::Choice: return Term::choice(enc_prog(r->lhs), enc_prog(r->rhs));
    case PdlProg::Kind::Star: return Term::star(enc_prog(r->lhs));
    case PdlProg::Kind::Test: return enc_examples(r->body);
  }
  throw FormulaError("unreachable");
}

// Programs computing the examples of an existential formula.
TermPtr enc_examples(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True: return Term::one();
    case Formula::Kind::False: return Term::zero();
    case Formula::Kind::Atom: return test_for(f->name, true);
    case Formula::Kind::NegAtom: return test_for(f->name, false);
    case Formula::Kind::And: return Term::seq(enc_examples(f->lhs), enc_examples(f->rhs));
    case Formula::Kind::Or: return Term::choice(enc_examples(f->lhs), enc_examples(f->rhs));
    case Formula::Kind::PdlDiamond:
      return Term::seq({Term::basic("push"), enc_prog(f->prog), enc_examples(f->lhs),
                        Term::basic("pop")});
    default: throw FormulaError("not an existential PDL formula");
  }
}

// Programs computing the counterexamples of a formula.
TermPtr enc(const FormulaPtr& f, bool instrumented) {
  auto rec = [&](const FormulaPtr& g) { return enc(g, instrumented); };
  switch (f->kind) {
    case Formula::Kind::True: return Term::zero();
    case Formula::Kind::False: return Term::one();
    case Formula::Kind::Atom: return test_for(f->name, false);
    case Formula::Kind::NegAtom: return test_for(f->name, true);
    case Formula::Kind::And: return Term::choice(rec(f->lhs), rec(f->rhs));
    case Formula::Kind::Or: return Term::seq(rec(f->lhs), rec(f->rhs));
    case Formula::Kind::AX:
    case Formula::Kind::Box:
      return Term::seq({Term::basic("push"), Term::basic("next"), rec(f->lhs),
                        Term::basic("pop")});
    case Formula::Kind::AF:
      return Term::seq({rec(f->lhs), Term::basic("push"), Term::basic("reset"),
                        Term::star(Term::seq({Term::basic("add"), Term::basic("next"),
                                              rec(f->lhs)})),
                        Term::basic("loop?"), Term::basic("pop")});
    case Formula::Kind::AG:
      return Term::seq({Term::basic("push"), Term::star(Term::basic("next")), rec(f->lhs),
                        Term::basic("pop")});
    case Formula::Kind::AU:
      return Term::seq({rec(f->rhs), Term::basic("push"), Term::basic("reset"),
                        Term::star(Term::seq({Term::basic("add"), Term::basic("next"),
                                              rec(f->rhs)})),
                        Term::choice(Term::basic("loop?"), rec(f->lhs)), Term::basic("pop")});
    case Formula::Kind::Var: return Term::var(term_var(f->name));
    case Formula::Kind::Mu: {
      TermPtr cont = Term::seq(Term::basic("add"), rec(f->lhs));
      TermPtr body = instrumented
                         ? Term::choice(Term::seq(Term::basic("!loop?"), cont),
                                        Term::basic("loop?"))
                         : Term::choice(Term::basic("loop?"), cont);
      return Term::seq({Term::basic("push"), Term::basic("reset"),
                        Term::mu(term_var(f->name), body), Term::basic("pop")});
    }
    case Formula::Kind::Nu: {
      if (instrumented)
        return Term::seq({Term::basic("push"), Term::basic("reset"),
                          Term::mu(term_var(f->name),
                                   Term::seq({Term::basic("!loop?"), Term::basic("add"),
                                              rec(f->lhs)})),
                          Term::basic("pop")});
      return Term::mu(term_var(f->name), rec(f->lhs));
    }
    case Formula::Kind::PdlBox:
      return Term::seq({Term::basic("push"), enc_prog(f->prog), rec(f->lhs),
                        Term::basic("pop")});
    case Formula::Kind::PdlDiamond:
      throw FormulaError("diamond formulae occur only inside programs");
  }
  throw FormulaError("unreachable");
}

}  // namespace

TermPtr encode(const FormulaPtr& f, Dialect dialect) {
  validate_dialect(f, dialect);
  return enc(f, false);
}

TermPtr encode_instrumented(const FormulaPtr& f) {
  validate_dialect(f, Dialect::Mu);
  return enc(f, true);
}

CheckResult check_concrete(const FormulaPtr& f, Dialect dialect, const TransitionSystem& ts,
                           const Bitset& init, EvalOptions opts) {
  TermPtr prog = encode(f, dialect);
  ConcreteStackDomain dom(ts);
  ConcreteEvaluator ev(dom, opts);
  StackSet out = ev.eval(prog, lift_states(init, ts));
  return {current_states(out, ts), out};
}

}  // namespace moka
