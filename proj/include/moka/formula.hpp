#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace moka {

enum class Dialect { Actl, Mu, Pdl };

struct Formula;
struct PdlProg;
using FormulaPtr = std::shared_ptr<const Formula>;
using PdlProgPtr = std::shared_ptr<const PdlProg>;

struct Formula {
  enum class Kind {
    True, False, Atom, NegAtom, And, Or,
    AX, AF, AG, AU,
    Box, Var, Mu, Nu,
    PdlBox, PdlDiamond,
  };

  Kind kind;
  std::string name;       // Atom/NegAtom proposition, Var/Mu/Nu variable
  FormulaPtr lhs, rhs;    // children; AU uses both, unary operators use lhs
  PdlProgPtr prog;        // PdlBox / PdlDiamond

  static FormulaPtr t();
  static FormulaPtr f();
  static FormulaPtr atom(std::string p);
  static FormulaPtr neg_atom(std::string p);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr ax(FormulaPtr a);
  static FormulaPtr af(FormulaPtr a);
  static FormulaPtr ag(FormulaPtr a);
  static FormulaPtr au(FormulaPtr a, FormulaPtr b);
  static FormulaPtr box(FormulaPtr a);
  static FormulaPtr var(std::string x);
  static FormulaPtr mu(std::string x, FormulaPtr a);
  static FormulaPtr nu(std::string x, FormulaPtr a);
  static FormulaPtr pdl_box(PdlProgPtr r, FormulaPtr a);
  static FormulaPtr pdl_diamond(PdlProgPtr r, FormulaPtr a);
};

struct PdlProg {
  enum class Kind { Next, Seq, Choice, Star, Test };

  Kind kind;
  PdlProgPtr lhs, rhs;
  FormulaPtr body;  // Test

  static PdlProgPtr next();
  static PdlProgPtr seq(PdlProgPtr a, PdlProgPtr b);
  static PdlProgPtr choice(PdlProgPtr a, PdlProgPtr b);
  static PdlProgPtr star(PdlProgPtr a);
  static PdlProgPtr test(FormulaPtr a);
};

struct FormulaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DialectViolation : FormulaError {
  using FormulaError::FormulaError;
};

std::string to_string(const FormulaPtr& f);

// Parses in the given dialect and validates dialect constraints: ACTL admits
// no fixpoints or boxes, the box fragment restricts nested fixpoints to a
// single independent variable each, PDL keeps universal connectives at the
// top level and existential ones inside programs.
FormulaPtr parse_formula(const std::string& text, Dialect dialect);

// Tries ACTL, then the fixpoint dialect, then PDL.
std::pair<FormulaPtr, Dialect> parse_formula_any(const std::string& text);

void validate_dialect(const FormulaPtr& f, Dialect dialect);

// AX/AF/AG/AU expressed through box and fixpoints.
FormulaPtr translate_actl_to_mu(const FormulaPtr& f);

}  // namespace moka
