#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "swsym/expr.hpp"

namespace swsym {

// Partial derivative with respect to a single symbol, treating every other
// symbol as an independent constant.  `symbol` must be a plain symbol
// expression (as produced by the Expr factories).
Expr diff(const Expr& e, const Expr& symbol);

// Total derivative D_c on jet space:
//   D_c e = de/dc + sum over jet variables q_J in e of q_{J+c} * de/dq_J,
// which raises the jet order of e by one.  If any jet variable in e already
// has order >= max_order, raises UnsupportedFormError.
Expr total_derivative(const Expr& e, char coord, int max_order = 2);

// Simultaneous substitution (all bindings applied to the original e at once)
// followed by normalization.  Bindings are keyed by symbol name.  A binding
// whose value contains its own key raises CycleError.  Substituting into an
// inverse atom whose base becomes zero raises PoleError.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

// IEEE-double evaluation of the normal form.  Every symbol occurring in e
// (including inside function arguments and inverse bases) must be bound;
// otherwise UnboundSymbolError.  A zero inverse base or a zero base raised
// to a negative power raises PoleError.
double eval_numeric(const Expr& e, const std::map<std::string, double>& bindings);

// Names of all symbols occurring in e, recursing into function arguments
// and inverse-atom bases.
std::set<std::string> symbols_of(const Expr& e);

bool contains_symbol(const Expr& e, const std::string& name);

// Expression pre-flattened against a fixed slot layout for fast repeated
// numeric evaluation (the inner loop of the ODE integrators).  Compilation
// resolves every symbol to a slot index once; unknown symbols raise
// UnboundSymbolError at compile time rather than per evaluation.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::vector<std::string>& slot_names);

  double eval(const double* slots) const;
  double eval(const std::vector<double>& slots) const { return eval(slots.data()); }

 private:
  struct AtomEval {
    enum class Kind { slot, fun, inv } kind = Kind::slot;
    int slot = -1;
    FunKind fun = FunKind::sin;
    std::unique_ptr<CompiledExpr> sub;  // fun argument or inverse base
  };
  struct Term {
    double coeff = 0.0;
    std::vector<std::pair<int, int>> powers;  // (atom index, exponent)
  };
  std::vector<AtomEval> atoms_;
  std::vector<Term> terms_;
};

}  // namespace swsym
