#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace moka {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Regular-command syntax with a least-fixpoint binder. MuApprox(X, n, body)
// is the n-th approximant of Mu(X, body); it only appears in derivations.
struct Term {
  enum class Kind { One, Zero, Basic, Seq, Choice, Star, Var, Mu, MuApprox };

  Kind kind;
  std::string name;  // Basic and Var
  TermPtr lhs, rhs;  // Seq/Choice children; lhs is the body of Star/Mu/MuApprox
  int approx = -1;   // MuApprox index

  static TermPtr one();
  static TermPtr zero();
  static TermPtr basic(std::string name);
  static TermPtr seq(TermPtr a, TermPtr b);
  static TermPtr seq(std::vector<TermPtr> parts);
  static TermPtr choice(TermPtr a, TermPtr b);
  static TermPtr star(TermPtr a);
  static TermPtr var(std::string name);
  static TermPtr mu(std::string var, TermPtr body);
  static TermPtr mu_approx(std::string var, int n, TermPtr body);

  bool operator==(const Term& o) const;
};

struct TermError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string to_string(const TermPtr& t);
TermPtr parse_term(const std::string& text);

std::set<std::string> free_vars(const TermPtr& t);

// Capture-avoiding substitution of s for the free occurrences of x in t.
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& s);

// MuApprox(x, n, body) for a Mu term; throws NotAMuTerm otherwise.
TermPtr approximant(const TermPtr& mu_term, int n);

// Syntactic gate for the per-frame memoized fixpoint strategy: along every
// path of the body, pushes and pops balance out, the computation never pops
// below the entry frame, and fixpoint variables are only applied at or above
// it. Unknown basic expressions are treated as top-frame operations.
bool frame_local(const TermPtr& body);

}  // namespace moka
