#include "moka/term.hpp"

#include <atomic>
#include <cctype>
#include <optional>

namespace moka {

namespace {
TermPtr mk(Term t) { return std::make_shared<const Term>(std::move(t)); }
}  // namespace

TermPtr Term::one() { return mk({Kind::One, "", nullptr, nullptr, -1}); }
TermPtr Term::zero() { return mk({Kind::Zero, "", nullptr, nullptr, -1}); }
TermPtr Term::basic(std::string name) { return mk({Kind::Basic, std::move(name), nullptr, nullptr, -1}); }
TermPtr Term::seq(TermPtr a, TermPtr b) { return mk({Kind::Seq, "", std::move(a), std::move(b), -1}); }
TermPtr Term::seq(std::vector<TermPtr> parts) {
  if (parts.empty()) return one();
  TermPtr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = seq(acc, parts[i]);
  return acc;
}
TermPtr Term::choice(TermPtr a, TermPtr b) { return mk({Kind::Choice, "", std::move(a), std::move(b), -1}); }
TermPtr Term::star(TermPtr a) { return mk({Kind::Star, "", std::move(a), nullptr, -1}); }
TermPtr Term::var(std::string name) { return mk({Kind::Var, std::move(name), nullptr, nullptr, -1}); }
TermPtr Term::mu(std::string var, TermPtr body) { return mk({Kind::Mu, std::move(var), std::move(body), nullptr, -1}); }
TermPtr Term::mu_approx(std::string var, int n, TermPtr body) {
  return mk({Kind::MuApprox, std::move(var), std::move(body), nullptr, n});
}

bool Term::operator==(const Term& o) const {
  if (kind != o.kind || name != o.name || approx != o.approx) return false;
  auto eq = [](const TermPtr& a, const TermPtr& b) {
    if (!a || !b) return a == b;
    return *a == *b;
  };
  return eq(lhs, o.lhs) && eq(rhs, o.rhs);
}

// --- printing; ';' binds tighter than '(+)', '*' is postfix ---

namespace {
int prec(Term::Kind k) {
  switch (k) {
    case Term::Kind::Choice: return 0;
    case Term::Kind::Seq: return 1;
    case Term::Kind::Star: return 2;
    case Term::Kind::Mu:
    case Term::Kind::MuApprox: return 0;
    default: return 3;
  }
}

void print(const TermPtr& t, int parent, std::string& out) {
  int p = prec(t->kind);
  bool paren = p < parent;
  if (paren) out += "(";
  switch (t->kind) {
    case Term::Kind::One: out += "1"; break;
    case Term::Kind::Zero: out += "0"; break;
    case Term::Kind::Basic: out += t->name; break;
    case Term::Kind::Var: out += t->name; break;
    case Term::Kind::Seq:
      print(t->lhs, 1, out);
      out += "; ";
      print(t->rhs, 1, out);
      break;
    case Term::Kind::Choice:
      print(t->lhs, 0, out);
      out += " (+) ";
      print(t->rhs, 1, out);
      break;
    case Term::Kind::Star:
      print(t->lhs, 2, out);
      out += "*";
      break;
    case Term::Kind::Mu:
      out += "mu " + t->name + ". ";
      print(t->lhs, 0, out);
      break;
    case Term::Kind::MuApprox:
      out += "mu[" + std::to_string(t->approx) + "] " + t->name + ". ";
      print(t->lhs, 0, out);
      break;
  }
  if (paren) out += ")";
}
}  // namespace

std::string to_string(const TermPtr& t) {
  std::string out;
  print(t, 0, out);
  return out;
}

// --- parsing ---

namespace {

struct Lexer {
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
  std::optional<char> peek() {
    skip();
    if (pos >= text.size()) return std::nullopt;
    return text[pos];
  }
  // Basic-expression and variable names: identifiers possibly prefixed with
  // '!' and extended with '=' / '!=' comparisons and a trailing '?'.
  std::optional<std::string> name() {
    skip();
    std::size_t start = pos;
    std::size_t p = pos;
    if (p < text.size() && text[p] == '!') ++p;
    if (p >= text.size() || !(std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
      return std::nullopt;
    while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
      ++p;
    if (p < text.size() && (text[p] == '=' || (text[p] == '!' && p + 1 < text.size() && text[p + 1] == '='))) {
      p += text[p] == '=' ? 1 : 2;
      while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
        ++p;
    }
    if (p < text.size() && text[p] == '?') ++p;
    pos = p;
    return text.substr(start, p - start);
  }
  [[noreturn]] void fail(const std::string& what) {
    throw TermError("ParseError at offset " + std::to_string(pos) + ": " + what);
  }
};

TermPtr parse_choice(Lexer& lx);

TermPtr parse_atom(Lexer& lx) {
  lx.skip();
  if (lx.eat("(")) {
    TermPtr t = parse_choice(lx);
    if (!lx.eat(")")) lx.fail("expected ')'");
    return t;
  }
  if (lx.eat("1")) return Term::one();
  if (lx.eat("0")) return Term::zero();
  if (lx.eat("mu ") || lx.eat("mu\t")) {
    auto v = lx.name();
    if (!v) lx.fail("expected variable after 'mu'");
    if (!lx.eat(".")) lx.fail("expected '.' after fixpoint variable");
    return Term::mu(*v, parse_choice(lx));
  }
  auto n = lx.name();
  if (!n) lx.fail("expected term");
  if (*n == "mu") {
    // 'mu' followed by variable without space was consumed as a name
    lx.fail("expected variable after 'mu'");
  }
  // Single upper-case identifiers without '?' act as variables.
  bool is_var = n->size() >= 1 && std::isupper(static_cast<unsigned char>((*n)[0])) &&
                n->back() != '?';
  return is_var ? Term::var(*n) : Term::basic(*n);
}

TermPtr parse_star(Lexer& lx) {
  TermPtr t = parse_atom(lx);
  while (lx.eat("*")) t = Term::star(t);
  return t;
}

TermPtr parse_seq(Lexer& lx) {
  TermPtr t = parse_star(lx);
  while (lx.eat(";")) t = Term::seq(t, parse_star(lx));
  return t;
}

TermPtr parse_choice(Lexer& lx) {
  TermPtr t = parse_seq(lx);
  while (lx.eat("(+)")) t = Term::choice(t, parse_seq(lx));
  return t;
}

}  // namespace

TermPtr parse_term(const std::string& text) {
  Lexer lx{text};
  TermPtr t = parse_choice(lx);
  lx.skip();
  if (lx.pos != text.size()) lx.fail("trailing input");
  return t;
}

// --- variables and substitution ---

namespace {
void collect_free(const TermPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      break;
    case Term::Kind::Seq:
    case Term::Kind::Choice:
      collect_free(t->lhs, bound, out);
      collect_free(t->rhs, bound, out);
      break;
    case Term::Kind::Star:
      collect_free(t->lhs, bound, out);
      break;
    case Term::Kind::Mu:
    case Term::Kind::MuApprox: {
      bool fresh = bound.insert(t->name).second;
      collect_free(t->lhs, bound, out);
      if (fresh) bound.erase(t->name);
      break;
    }
    default: break;
  }
}

std::atomic<int> fresh_counter{0};
std::string fresh_name(const std::string& base) {
  return base + "'" + std::to_string(++fresh_counter);
}
}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  collect_free(t, bound, out);
  return out;
}

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s) {
  switch (t->kind) {
    case Term::Kind::One:
    case Term::Kind::Zero:
    case Term::Kind::Basic: return t;
    case Term::Kind::Var: return t->name == x ? s : t;
    case Term::Kind::Seq: return Term::seq(substitute(t->lhs, x, s), substitute(t->rhs, x, s));
    case Term::Kind::Choice:
      return Term::choice(substitute(t->lhs, x, s), substitute(t->rhs, x, s));
    case Term::Kind::Star: return Term::star(substitute(t->lhs, x, s));
    case Term::Kind::Mu:
    case Term::Kind::MuApprox: {
      if (t->name == x) return t;
      TermPtr body = t->lhs;
      std::string binder = t->name;
      if (free_vars(s).count(binder)) {
        std::string nb = fresh_name(binder);
        body = substitute(body, binder, Term::var(nb));
        binder = nb;
      }
      body = substitute(body, x, s);
      return t->kind == Term::Kind::Mu ? Term::mu(binder, body)
                                       : Term::mu_approx(binder, t->approx, body);
    }
  }
  return t;
}

TermPtr approximant(const TermPtr& mu_term, int n) {
  if (mu_term->kind != Term::Kind::Mu) throw TermError("NotAMuTerm");
  if (n < 0) throw TermError("approximant index must be non-negative");
  return Term::mu_approx(mu_term->name, n, mu_term->lhs);
}

// --- frame-locality analysis ---

namespace {
struct Depth {
  int net;  // stack growth along the path
  int min;  // lowest depth reached relative to entry (0 = entry frame)
};

// Returns nullopt when the term is not frame-local. `depth` is the current
// relative depth; entry is 0 and no operation may act below it.
std::optional<Depth> analyze(const TermPtr& t, int depth) {
  switch (t->kind) {
    case Term::Kind::One:
    case Term::Kind::Zero: return Depth{0, depth};
    case Term::Kind::Basic:
      if (t->name == "push") return Depth{1, depth};
      if (t->name == "pop") {
        if (depth - 1 < 0) return std::nullopt;  // would pop the entry frame
        return Depth{-1, depth - 1};
      }
      return depth >= 0 ? std::optional<Depth>(Depth{0, depth}) : std::nullopt;
    case Term::Kind::Var:
      return depth >= 0 ? std::optional<Depth>(Depth{0, depth}) : std::nullopt;
    case Term::Kind::Seq: {
      auto a = analyze(t->lhs, depth);
      if (!a) return std::nullopt;
      auto b = analyze(t->rhs, depth + a->net);
      if (!b) return std::nullopt;
      return Depth{a->net + b->net, std::min(a->min, b->min)};
    }
    case Term::Kind::Choice: {
      auto a = analyze(t->lhs, depth);
      auto b = analyze(t->rhs, depth);
      if (!a || !b || a->net != b->net) return std::nullopt;
      return Depth{a->net, std::min(a->min, b->min)};
    }
    case Term::Kind::Star: {
      auto a = analyze(t->lhs, depth);
      if (!a || a->net != 0) return std::nullopt;
      return Depth{0, a->min};
    }
    case Term::Kind::Mu:
    case Term::Kind::MuApprox: {
      auto a = analyze(t->lhs, depth);
      if (!a || a->net != 0) return std::nullopt;
      return Depth{0, a->min};
    }
  }
  return std::nullopt;
}
}  // namespace

bool frame_local(const TermPtr& body) {
  auto d = analyze(body, 0);
  return d && d->net == 0 && d->min >= 0;
}

}  // namespace moka
