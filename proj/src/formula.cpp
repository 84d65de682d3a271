#include "moka/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>

namespace moka {

namespace {
FormulaPtr mkf(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
PdlProgPtr mkp(PdlProg p) { return std::make_shared<const PdlProg>(std::move(p)); }
}  // namespace

FormulaPtr Formula::t() { return mkf({Kind::True, "", nullptr, nullptr, nullptr}); }
FormulaPtr Formula::f() { return mkf({Kind::False, "", nullptr, nullptr, nullptr}); }
FormulaPtr Formula::atom(std::string p) { return mkf({Kind::Atom, std::move(p), nullptr, nullptr, nullptr}); }
FormulaPtr Formula::neg_atom(std::string p) { return mkf({Kind::NegAtom, std::move(p), nullptr, nullptr, nullptr}); }
FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) { return mkf({Kind::And, "", std::move(a), std::move(b), nullptr}); }
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) { return mkf({Kind::Or, "", std::move(a), std::move(b), nullptr}); }
FormulaPtr Formula::ax(FormulaPtr a) { return mkf({Kind::AX, "", std::move(a), nullptr, nullptr}); }
FormulaPtr Formula::af(FormulaPtr a) { return mkf({Kind::AF, "", std::move(a), nullptr, nullptr}); }
FormulaPtr Formula::ag(FormulaPtr a) { return mkf({Kind::AG, "", std::move(a), nullptr, nullptr}); }
FormulaPtr Formula::au(FormulaPtr a, FormulaPtr b) { return mkf({Kind::AU, "", std::move(a), std::move(b), nullptr}); }
FormulaPtr Formula::box(FormulaPtr a) { return mkf({Kind::Box, "", std::move(a), nullptr, nullptr}); }
FormulaPtr Formula::var(std::string x) { return mkf({Kind::Var, std::move(x), nullptr, nullptr, nullptr}); }
FormulaPtr Formula::mu(std::string x, FormulaPtr a) { return mkf({Kind::Mu, std::move(x), std::move(a), nullptr, nullptr}); }
FormulaPtr Formula::nu(std::string x, FormulaPtr a) { return mkf({Kind::Nu, std::move(x), std::move(a), nullptr, nullptr}); }
FormulaPtr Formula::pdl_box(PdlProgPtr r, FormulaPtr a) { return mkf({Kind::PdlBox, "", std::move(a), nullptr, std::move(r)}); }
FormulaPtr Formula::pdl_diamond(PdlProgPtr r, FormulaPtr a) { return mkf({Kind::PdlDiamond, "", std::move(a), nullptr, std::move(r)}); }

PdlProgPtr PdlProg::next() { return mkp({Kind::Next, nullptr, nullptr, nullptr}); }
PdlProgPtr PdlProg::seq(PdlProgPtr a, PdlProgPtr b) { return mkp({Kind::Seq, std::move(a), std::move(b), nullptr}); }
PdlProgPtr PdlProg::choice(PdlProgPtr a, PdlProgPtr b) { return mkp({Kind::Choice, std::move(a), std::move(b), nullptr}); }
PdlProgPtr PdlProg::star(PdlProgPtr a) { return mkp({Kind::Star, std::move(a), nullptr, nullptr}); }
PdlProgPtr PdlProg::test(FormulaPtr a) { return mkp({Kind::Test, nullptr, nullptr, std::move(a)}); }

// --- printing ---

namespace {
std::string prog_str(const PdlProgPtr& r);

std::string fstr(const FormulaPtr& f, int parent) {
  // precedence: 0 '->'-level, 1 '|', 2 '&', 3 unary/atoms
  auto wrap = [&](int p, std::string s) { return p < parent ? "(" + s + ")" : s; };
  switch (f->kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Atom: return f->name;
    case Formula::Kind::NegAtom: return "!" + f->name;
    case Formula::Kind::And: return wrap(2, fstr(f->lhs, 2) + " & " + fstr(f->rhs, 3));
    case Formula::Kind::Or: return wrap(1, fstr(f->lhs, 1) + " | " + fstr(f->rhs, 2));
    case Formula::Kind::AX: return wrap(3, "AX " + fstr(f->lhs, 3));
    case Formula::Kind::AF: return wrap(3, "AF " + fstr(f->lhs, 3));
    case Formula::Kind::AG: return wrap(3, "AG " + fstr(f->lhs, 3));
    case Formula::Kind::AU: return "A[" + fstr(f->lhs, 0) + " U " + fstr(f->rhs, 0) + "]";
    case Formula::Kind::Box: return wrap(3, "[] " + fstr(f->lhs, 3));
    case Formula::Kind::Var: return f->name;
    case Formula::Kind::Mu: return wrap(1, "mu " + f->name + ". " + fstr(f->lhs, 1));
    case Formula::Kind::Nu: return wrap(1, "nu " + f->name + ". " + fstr(f->lhs, 1));
    case Formula::Kind::PdlBox: return wrap(3, "[" + prog_str(f->prog) + "] " + fstr(f->lhs, 3));
    case Formula::Kind::PdlDiamond:
      return wrap(3, "<" + prog_str(f->prog) + "> " + fstr(f->lhs, 3));
  }
  return "?";
}

std::string prog_str(const PdlProgPtr& r) {
  switch (r->kind) {
    case PdlProg::Kind::Next: return "next";
    case PdlProg::Kind::Seq: return prog_str(r->lhs) + " ; " + prog_str(r->rhs);
    case PdlProg::Kind::Choice: return prog_str(r->lhs) + " + " + prog_str(r->rhs);
    case PdlProg::Kind::Star: {
      std::string inner = prog_str(r->lhs);
      bool atom = r->lhs->kind == PdlProg::Kind::Next;
      return (atom ? inner : "(" + inner + ")") + "*";
    }
    case PdlProg::Kind::Test: return fstr(r->body, 3) + " ?";
  }
  return "?";
}
}  // namespace

std::string to_string(const FormulaPtr& f) { return fstr(f, 0); }

// --- parsing ---

namespace {

struct FLexer {
  std::string text;
  std::size_t pos = 0;

  void skip() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(const std::string& tok) {
    skip();
    if (text.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  bool eat_word(const std::string& w) {
    skip();
    if (text.compare(pos, w.size(), w) != 0) return false;
    std::size_t end = pos + w.size();
    if (end < text.size() &&
        (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
      return false;
    pos = end;
    return true;
  }
  std::optional<char> peek() {
    skip();
    if (pos >= text.size()) return std::nullopt;
    return text[pos];
  }
  // identifier, optionally extended with a '='/'!=' comparison suffix
  std::optional<std::string> ident() {
    skip();
    std::size_t p = pos;
    if (p >= text.size() || !(std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
      return std::nullopt;
    while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
      ++p;
    if (p < text.size() && text[p] == '=' && (p + 1 >= text.size() || text[p + 1] != '=')) {
      ++p;
      while (p < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
        ++p;
    } else if (p + 1 < text.size() && text[p] == '!' && text[p + 1] == '=') {
      p += 2;
      while (p < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
        ++p;
    }
    std::string out = text.substr(pos, p - pos);
    pos = p;
    return out;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw FormulaError("ParseError at offset " + std::to_string(pos) + ": " + what);
  }
};

// "x!=y" atoms denote the negation of "x=y"
FormulaPtr atom_of(const std::string& name) {
  auto bang = name.find("!=");
  if (bang != std::string::npos) {
    std::string base = name.substr(0, bang) + "=" + name.substr(bang + 2);
    return Formula::neg_atom(base);
  }
  return Formula::atom(name);
}

struct FParser {
  FLexer lx;
  Dialect dialect;
  std::vector<std::string> bound;  // fixpoint variables in scope

  bool is_bound(const std::string& n) const {
    return std::find(bound.begin(), bound.end(), n) != bound.end();
  }

  FormulaPtr formula() { return implies(); }

  FormulaPtr implies() {
    FormulaPtr lhs = disjunction();
    if (lx.eat("->")) {
      // sugar: p -> f  ==  !p | f, atom antecedents only
      FormulaPtr rhs = implies();
      if (lhs->kind == Formula::Kind::Atom)
        return Formula::disj(Formula::neg_atom(lhs->name), rhs);
      if (lhs->kind == Formula::Kind::NegAtom)
        return Formula::disj(Formula::atom(lhs->name), rhs);
      lx.fail("'->' requires an atomic antecedent");
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr f = conjunction();
    while (true) {
      lx.skip();
      // don't confuse '|' with '||'
      if (lx.peek() == '|' ) {
        lx.eat("|");
        f = Formula::disj(f, conjunction());
      } else {
        return f;
      }
    }
  }

  FormulaPtr conjunction() {
    FormulaPtr f = unary();
    while (lx.eat("&")) f = Formula::conj(f, unary());
    return f;
  }

  FormulaPtr unary() {
    lx.skip();
    if (lx.eat_word("true")) return Formula::t();
    if (lx.eat_word("false")) return Formula::f();
    if (lx.eat_word("AX")) return Formula::ax(unary());
    if (lx.eat_word("AF")) return Formula::af(unary());
    if (lx.eat_word("AG")) return Formula::ag(unary());
    if (lx.eat_word("mu")) return binder(true);
    if (lx.eat_word("nu")) return binder(false);
    if (lx.peek() == 'A' && lx.text.compare(lx.pos, 2, "A[") == 0) {
      lx.eat("A[");
      FormulaPtr a = formula();
      if (!lx.eat_word("U")) lx.fail("expected 'U' in A[.. U ..]");
      FormulaPtr b = formula();
      if (!lx.eat("]")) lx.fail("expected ']'");
      return Formula::au(a, b);
    }
    if (lx.eat("[]")) return Formula::box(unary());
    if (lx.eat("[")) {
      PdlProgPtr r = prog();
      if (!lx.eat("]")) lx.fail("expected ']' after program");
      return Formula::pdl_box(r, unary());
    }
    if (lx.eat("<")) {
      PdlProgPtr r = prog();
      if (!lx.eat(">")) lx.fail("expected '>' after program");
      return Formula::pdl_diamond(r, unary());
    }
    if (lx.eat("!")) {
      auto id = lx.ident();
      if (!id) lx.fail("expected proposition after '!'");
      FormulaPtr a = atom_of(*id);
      if (a->kind == Formula::Kind::Atom) return Formula::neg_atom(a->name);
      return Formula::atom(a->name);
    }
    if (lx.eat("(")) {
      FormulaPtr f = formula();
      if (!lx.eat(")")) lx.fail("expected ')'");
      return f;
    }
    auto id = lx.ident();
    if (!id) lx.fail("expected formula");
    if (is_bound(*id)) return Formula::var(*id);
    return atom_of(*id);
  }

  FormulaPtr binder(bool least) {
    auto v = lx.ident();
    if (!v) lx.fail("expected fixpoint variable");
    if (!lx.eat(".")) lx.fail("expected '.' after fixpoint variable");
    bound.push_back(*v);
    FormulaPtr body = formula();
    bound.pop_back();
    return least ? Formula::mu(*v, body) : Formula::nu(*v, body);
  }

  // programs: '+' < ';' < postfix '*'; atoms: next, (r), formula '?'
  PdlProgPtr prog() {
    PdlProgPtr r = prog_seq();
    while (lx.eat("+")) r = PdlProg::choice(r, prog_seq());
    return r;
  }
  PdlProgPtr prog_seq() {
    PdlProgPtr r = prog_star();
    while (lx.eat(";")) r = PdlProg::seq(r, prog_star());
    return r;
  }
  PdlProgPtr prog_star() {
    PdlProgPtr r = prog_atom();
    while (lx.eat("*")) r = PdlProg::star(r);
    return r;
  }
  PdlProgPtr prog_atom() {
    lx.skip();
    if (lx.eat_word("next")) return PdlProg::next();
    if (lx.eat("(")) {
      PdlProgPtr r = prog();
      if (!lx.eat(")")) lx.fail("expected ')' in program");
      return r;
    }
    FormulaPtr t = formula();
    if (!lx.eat("?")) lx.fail("expected '?' after test formula");
    return PdlProg::test(t);
  }
};

// Fixpoint variables bound around each subformula must not leak into a
// nested fixpoint's body: every binder's body may use its own variable only.
void check_single_variable(const FormulaPtr& f) {
  std::function<std::set<std::string>(const FormulaPtr&)> fv = [&](const FormulaPtr& g) {
    std::set<std::string> out;
    switch (g->kind) {
      case Formula::Kind::Var: out.insert(g->name); break;
      case Formula::Kind::Mu:
      case Formula::Kind::Nu: {
        out = fv(g->lhs);
        out.erase(g->name);
        break;
      }
      default:
        if (g->lhs) {
          auto a = fv(g->lhs);
          out.insert(a.begin(), a.end());
        }
        if (g->rhs) {
          auto b = fv(g->rhs);
          out.insert(b.begin(), b.end());
        }
        break;
    }
    return out;
  };
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Mu || g->kind == Formula::Kind::Nu) {
      auto free = fv(g->lhs);
      free.erase(g->name);
      if (!free.empty())
        throw DialectViolation("DialectViolation: fixpoint over " + g->name +
                               " depends on enclosing variable " + *free.begin());
    }
    if (g->lhs) walk(g->lhs);
    if (g->rhs) walk(g->rhs);
  };
  walk(f);
  auto free = fv(f);
  if (!free.empty())
    throw DialectViolation("DialectViolation: free fixpoint variable " + *free.begin());
}

void check_pdl_prog(const PdlProgPtr& r);

void check_pdl_existential(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom:
    case Formula::Kind::NegAtom: return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      check_pdl_existential(f->lhs);
      check_pdl_existential(f->rhs);
      return;
    case Formula::Kind::PdlDiamond:
      check_pdl_prog(f->prog);
      check_pdl_existential(f->lhs);
      return;
    default:
      throw DialectViolation("DialectViolation: only existential formulae may appear in programs");
  }
}

void check_pdl_prog(const PdlProgPtr& r) {
  switch (r->kind) {
    case PdlProg::Kind::Next: return;
    case PdlProg::Kind::Seq:
    case PdlProg::Kind::Choice:
      check_pdl_prog(r->lhs);
      check_pdl_prog(r->rhs);
      return;
    case PdlProg::Kind::Star: check_pdl_prog(r->lhs); return;
    case PdlProg::Kind::Test: check_pdl_existential(r->body); return;
  }
}

void check_pdl_universal(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom:
    case Formula::Kind::NegAtom: return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      check_pdl_universal(f->lhs);
      check_pdl_universal(f->rhs);
      return;
    case Formula::Kind::PdlBox:
      check_pdl_prog(f->prog);
      check_pdl_universal(f->lhs);
      return;
    default:
      throw DialectViolation("DialectViolation: not a universal PDL formula");
  }
}

}  // namespace

void validate_dialect(const FormulaPtr& f, Dialect dialect) {
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    switch (g->kind) {
      case Formula::Kind::AX:
      case Formula::Kind::AF:
      case Formula::Kind::AG:
      case Formula::Kind::AU:
        if (dialect != Dialect::Actl)
          throw DialectViolation("DialectViolation: path operator outside the ACTL dialect");
        break;
      case Formula::Kind::Box:
      case Formula::Kind::Var:
      case Formula::Kind::Mu:
      case Formula::Kind::Nu:
        if (dialect != Dialect::Mu)
          throw DialectViolation("DialectViolation: fixpoint syntax outside the box dialect");
        break;
      case Formula::Kind::PdlBox:
      case Formula::Kind::PdlDiamond:
        if (dialect != Dialect::Pdl)
          throw DialectViolation("DialectViolation: program modality outside the PDL dialect");
        break;
      default: break;
    }
    if (g->lhs) walk(g->lhs);
    if (g->rhs) walk(g->rhs);
  };
  switch (dialect) {
    case Dialect::Actl: walk(f); break;
    case Dialect::Mu:
      walk(f);
      check_single_variable(f);
      break;
    case Dialect::Pdl: check_pdl_universal(f); break;
  }
}

FormulaPtr parse_formula(const std::string& text, Dialect dialect) {
  FParser p{FLexer{text}, dialect, {}};
  FormulaPtr f = p.formula();
  p.lx.skip();
  if (p.lx.pos != text.size()) p.lx.fail("trailing input");
  validate_dialect(f, dialect);
  return f;
}

std::pair<FormulaPtr, Dialect> parse_formula_any(const std::string& text) {
  std::string err;
  for (Dialect d : {Dialect::Actl, Dialect::Mu, Dialect::Pdl}) {
    try {
      return {parse_formula(text, d), d};
    } catch (const FormulaError& e) {
      err = e.what();
    }
  }
  throw FormulaError(err);
}

FormulaPtr translate_actl_to_mu(const FormulaPtr& f) {
  static int counter = 0;
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom:
    case Formula::Kind::NegAtom: return f;
    case Formula::Kind::And:
      return Formula::conj(translate_actl_to_mu(f->lhs), translate_actl_to_mu(f->rhs));
    case Formula::Kind::Or:
      return Formula::disj(translate_actl_to_mu(f->lhs), translate_actl_to_mu(f->rhs));
    case Formula::Kind::AX: return Formula::box(translate_actl_to_mu(f->lhs));
    case Formula::Kind::AF: {
      std::string x = "x" + std::to_string(++counter);
      return Formula::mu(x, Formula::disj(translate_actl_to_mu(f->lhs),
                                          Formula::box(Formula::var(x))));
    }
    case Formula::Kind::AG: {
      std::string x = "x" + std::to_string(++counter);
      return Formula::nu(x, Formula::conj(translate_actl_to_mu(f->lhs),
                                          Formula::box(Formula::var(x))));
    }
    case Formula::Kind::AU: {
      std::string x = "x" + std::to_string(++counter);
      return Formula::mu(
          x, Formula::disj(translate_actl_to_mu(f->rhs),
                           Formula::conj(translate_actl_to_mu(f->lhs),
                                         Formula::box(Formula::var(x)))));
    }
    default: throw FormulaError("not an ACTL formula");
  }
}

}  // namespace moka
