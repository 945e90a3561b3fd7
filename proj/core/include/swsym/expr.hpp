#pragma once

// Exact symbolic expression kernel with a unique canonical normal form.
//
// An Expr is a sparse multivariate polynomial over "atoms" with exact
// rational coefficients.  Atoms are:
//   - symbols (parameters, coordinates, jet variables, integration constants),
//   - function atoms sin/cos/sinh/cosh/exp applied to an Expr argument,
//   - inverse atoms (P)^-1 for a primitive multi-term polynomial P.
// Monomials may carry negative exponents on symbol and function atoms
// (Laurent style), so 1/t is simply t^-1; inverse atoms are only created
// for multi-term denominators such as (U - w)^-1.
//
// Canonical-form guarantees:
//   - rationals stored reduced; like terms merged; terms sorted by a fixed
//     graded-lexicographic order on monomials,
//   - sin(L)^2 is always rewritten to 1 - cos(L)^2 (so sin exponents stay
//     below 2 in normal form),
//   - products of exp atoms are merged: exp(a)*exp(b) -> exp(a+b), exp(0) -> 1,
//   - sin/sinh arguments are sign-normalized (sin(-L) -> -sin(L)), cos/cosh
//     arguments likewise (cos(-L) -> cos(L)),
//   - inverse atoms have primitive, sign-normalized, monomial-content-free
//     bases, and exact multivariate division cancels (P)*(P)^-1 -> 1.
// Under these rules an expression equals zero iff its normal form is the
// zero polynomial (the Pythagorean identity is the only relation among the
// trig atoms, and it is quotiented out by the sin^2 rewrite).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swsym {

using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& q);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised for forms outside the supported closure (e.g. non-integer powers).
struct UnsupportedFormError : ExprError {
  using ExprError::ExprError;
};
// Raised when a substitution binds a symbol to an expression containing it.
struct CycleError : ExprError {
  using ExprError::ExprError;
};
// Raised by numeric evaluation when a symbol has no binding.
struct UnboundSymbolError : ExprError {
  using ExprError::ExprError;
};
// Raised on division by zero (symbolic or numeric).
struct PoleError : ExprError {
  using ExprError::ExprError;
};
// Raised by the expression parser on malformed input.
struct ParseError : ExprError {
  using ExprError::ExprError;
};

// ---------------------------------------------------------------------------
// Symbols and atoms
// ---------------------------------------------------------------------------

enum class SymbolKind {
  parameter,
  coordinate,
  jet_variable,
  integration_constant,
};

enum class FunKind { sin, cos, sinh, cosh, exp };

const char* fun_name(FunKind f);

// Derivative multi-index of a jet variable over the independent coordinates.
struct JetIndex {
  std::map<char, int> counts;  // coordinate letter -> derivative count

  int order() const;
  // Canonical suffix, e.g. "x", "tx", "xxy"; coordinate order is t,x,y,w.
  std::string suffix() const;
  JetIndex raised(char coord) const;

  bool operator==(const JetIndex&) const = default;
};

using AtomId = std::uint32_t;

class Expr;

namespace detail {

enum class AtomKind { symbol, fun, inv };

struct Atom {
  AtomKind kind;
  std::string key;  // canonical identity/order key

  // symbol fields
  std::string name;
  SymbolKind symbol_kind = SymbolKind::parameter;
  char jet_dep = 0;
  JetIndex jet_index;

  // fun fields
  FunKind fun = FunKind::sin;
  std::shared_ptr<const Expr> arg;

  // inv fields: base is a primitive multi-term polynomial
  std::shared_ptr<const Expr> base;
};

const Atom& atom(AtomId id);

// Monomial: sorted by ascending atom key; exponents nonzero.  Symbol and fun
// atoms admit negative exponents; inverse atoms only positive ones.
using Monomial = std::vector<std::pair<AtomId, int>>;

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

using Poly = std::map<Monomial, Rational, MonomialLess>;

}  // namespace detail

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

class Expr {
 public:
  Expr();  // zero
  Expr(long n);
  Expr(const Rational& q);

  static Expr integer(long n) { return Expr(n); }
  static Expr rational(long num, long den);

  // Symbol factories.  Symbols are interned: the same (name, kind) always
  // yields the same atom; reusing a name across kinds is an error.
  static Expr parameter(const std::string& name);
  static Expr coordinate(char c);                       // t, x, y, w
  static Expr dependent(char dep);                      // u,v,h,H,U,V (order 0)
  static Expr jet(char dep, const std::string& coords); // e.g. jet('u', "x")
  static Expr jet(char dep, const JetIndex& index);
  static Expr integration_constant(const std::string& name);  // H0, U0, V0

  static Expr fun(FunKind f, const Expr& arg);

  bool is_zero() const;
  bool is_one() const;
  bool is_rational() const;
  std::optional<Rational> as_rational() const;
  std::size_t term_count() const;

  Expr pow(int k) const;

  bool operator==(const Expr& other) const;
  bool operator!=(const Expr& other) const { return !(*this == other); }

  // Canonical plain-text form (see docs/expression-grammar.md); parses back
  // to an equal Expr.
  std::string str() const;

  const detail::Poly& poly() const { return *p_; }
  static Expr from_poly(detail::Poly p);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }
  Expr& operator/=(const Expr& b) { return *this = *this / b; }

 private:
  explicit Expr(std::shared_ptr<const detail::Poly> p) : p_(std::move(p)) {}
  std::shared_ptr<const detail::Poly> p_;
};

// Expressions are canonical by construction; normalize is the (idempotent)
// identity on them.  Exposed so callers can state intent and tests can pin
// idempotence.
Expr normalize(const Expr& e);

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

inline Expr operator+(const Expr& a, long b) { return a + Expr(b); }
inline Expr operator+(long a, const Expr& b) { return Expr(a) + b; }
inline Expr operator-(const Expr& a, long b) { return a - Expr(b); }
inline Expr operator-(long a, const Expr& b) { return Expr(a) - b; }
inline Expr operator*(const Expr& a, long b) { return a * Expr(b); }
inline Expr operator*(long a, const Expr& b) { return Expr(a) * b; }
inline Expr operator/(const Expr& a, long b) { return a / Expr(b); }
inline Expr operator/(long a, const Expr& b) { return Expr(a) / b; }

// Convenience builders for the standard trig/hyperbolic/exponential atoms.
inline Expr sin(const Expr& e) { return Expr::fun(FunKind::sin, e); }
inline Expr cos(const Expr& e) { return Expr::fun(FunKind::cos, e); }
inline Expr sinh(const Expr& e) { return Expr::fun(FunKind::sinh, e); }
inline Expr cosh(const Expr& e) { return Expr::fun(FunKind::cosh, e); }
inline Expr exp(const Expr& e) { return Expr::fun(FunKind::exp, e); }

// Metadata of the symbol atom underlying a single-symbol expression, if any.
struct SymbolInfo {
  std::string name;
  SymbolKind kind;
  char jet_dep = 0;
  JetIndex jet_index;
};
std::optional<SymbolInfo> as_symbol(const Expr& e);

}  // namespace swsym
