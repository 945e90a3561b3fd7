#include "swsym/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace swsym {

namespace {

using detail::Atom;
using detail::AtomKind;
using detail::Monomial;
using detail::Poly;

Expr atom_expr(AtomId id) {
  Poly p;
  Monomial m;
  m.emplace_back(id, 1);
  p.emplace(std::move(m), Rational(1));
  return Expr::from_poly(std::move(p));
}

}  // namespace

Expr diff(const Expr& e, const Expr& symbol) {
  auto info = as_symbol(symbol);
  if (!info) throw ExprError("diff target must be a single symbol");
  const std::string& name = info->name;

  // memoized per-call derivative of each distinct atom
  std::map<AtomId, Expr> datoms;
  auto d_atom = [&](AtomId id, auto&& self) -> const Expr& {
    auto it = datoms.find(id);
    if (it != datoms.end()) return it->second;
    const Atom& a = detail::atom(id);
    Expr d;
    switch (a.kind) {
      case AtomKind::symbol:
        d = (a.name == name) ? Expr(1L) : Expr(0L);
        break;
      case AtomKind::fun: {
        Expr darg = diff(*a.arg, symbol);
        if (darg.is_zero()) {
          d = Expr(0L);
        } else {
          switch (a.fun) {
            case FunKind::sin: d = cos(*a.arg) * darg; break;
            case FunKind::cos: d = -sin(*a.arg) * darg; break;
            case FunKind::sinh: d = cosh(*a.arg) * darg; break;
            case FunKind::cosh: d = sinh(*a.arg) * darg; break;
            case FunKind::exp: d = exp(*a.arg) * darg; break;
          }
        }
        break;
      }
      case AtomKind::inv: {
        Expr dbase = diff(*a.base, symbol);
        if (dbase.is_zero())
          d = Expr(0L);
        else
          d = -atom_expr(id).pow(2) * dbase;
        break;
      }
    }
    return datoms.emplace(id, std::move(d)).first->second;
  };

  Expr result;
  for (const auto& [m, c] : e.poly()) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& [id, k] = m[i];
      const Expr& da = d_atom(id, d_atom);
      if (da.is_zero()) continue;
      // c * k * a^(k-1) * (other factors) * da
      Poly p;
      Monomial rest;
      rest.reserve(m.size());
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (j == i) {
          if (k - 1 != 0) rest.emplace_back(id, k - 1);
        } else {
          rest.push_back(m[j]);
        }
      }
      p.emplace(std::move(rest), c * k);
      result += Expr::from_poly(std::move(p)) * da;
    }
  }
  return result;
}

namespace {

void collect_symbols(const Expr& e, std::set<AtomId>& out) {
  for (const auto& [m, c] : e.poly()) {
    for (const auto& [id, k] : m) {
      const Atom& a = detail::atom(id);
      switch (a.kind) {
        case AtomKind::symbol:
          out.insert(id);
          break;
        case AtomKind::fun:
          collect_symbols(*a.arg, out);
          break;
        case AtomKind::inv:
          collect_symbols(*a.base, out);
          break;
      }
    }
  }
}

}  // namespace

Expr total_derivative(const Expr& e, char coord, int max_order) {
  std::set<AtomId> syms;
  collect_symbols(e, syms);
  Expr result = diff(e, Expr::coordinate(coord));
  for (AtomId id : syms) {
    const Atom& a = detail::atom(id);
    if (a.symbol_kind != SymbolKind::jet_variable) continue;
    if (a.jet_index.order() >= max_order)
      throw UnsupportedFormError("total derivative would exceed jet order " +
                                 std::to_string(max_order) + " (from " + a.name + ")");
    Expr de = diff(e, atom_expr(id));
    if (de.is_zero()) continue;
    result += Expr::jet(a.jet_dep, a.jet_index.raised(coord)) * de;
  }
  return result;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  for (const auto& [name, value] : bindings) {
    if (contains_symbol(value, name))
      throw CycleError("binding for '" + name + "' contains itself");
  }

  std::map<AtomId, Expr> cache;
  auto atom_value = [&](AtomId id, auto&& self) -> const Expr& {
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    const Atom& a = detail::atom(id);
    Expr v;
    switch (a.kind) {
      case AtomKind::symbol: {
        auto bit = bindings.find(a.name);
        v = (bit != bindings.end()) ? bit->second : atom_expr(id);
        break;
      }
      case AtomKind::fun:
        v = Expr::fun(a.fun, substitute(*a.arg, bindings));
        break;
      case AtomKind::inv:
        v = Expr(1L) / substitute(*a.base, bindings);
        break;
    }
    return cache.emplace(id, std::move(v)).first->second;
  };

  Expr result;
  for (const auto& [m, c] : e.poly()) {
    Expr term = Expr(c);
    for (const auto& [id, k] : m) {
      const Expr& v = atom_value(id, atom_value);
      term *= v.pow(k);
    }
    result += term;
  }
  return result;
}

namespace {

double eval_atom(AtomId id, const std::map<std::string, double>& bindings);

double eval_poly(const Poly& p, const std::map<std::string, double>& bindings) {
  double sum = 0.0;
  for (const auto& [m, c] : p) {
    double v = to_double(c);
    for (const auto& [id, k] : m) {
      double av = eval_atom(id, bindings);
      if (k < 0 && av == 0.0) throw PoleError("zero base raised to a negative power");
      v *= std::pow(av, k);
    }
    sum += v;
  }
  return sum;
}

double eval_atom(AtomId id, const std::map<std::string, double>& bindings) {
  const Atom& a = detail::atom(id);
  switch (a.kind) {
    case AtomKind::symbol: {
      auto it = bindings.find(a.name);
      if (it == bindings.end()) throw UnboundSymbolError("unbound symbol '" + a.name + "'");
      return it->second;
    }
    case AtomKind::fun: {
      double arg = eval_poly(a.arg->poly(), bindings);
      switch (a.fun) {
        case FunKind::sin: return std::sin(arg);
        case FunKind::cos: return std::cos(arg);
        case FunKind::sinh: return std::sinh(arg);
        case FunKind::cosh: return std::cosh(arg);
        case FunKind::exp: return std::exp(arg);
      }
      return 0.0;
    }
    case AtomKind::inv: {
      double base = eval_poly(a.base->poly(), bindings);
      if (base == 0.0) throw PoleError("inverse of zero while evaluating");
      return 1.0 / base;
    }
  }
  return 0.0;
}

}  // namespace

double eval_numeric(const Expr& e, const std::map<std::string, double>& bindings) {
  return eval_poly(e.poly(), bindings);
}

std::set<std::string> symbols_of(const Expr& e) {
  std::set<AtomId> ids;
  collect_symbols(e, ids);
  std::set<std::string> names;
  for (AtomId id : ids) names.insert(detail::atom(id).name);
  return names;
}

bool contains_symbol(const Expr& e, const std::string& name) {
  return symbols_of(e).count(name) > 0;
}

// ---------------------------------------------------------------------------
// CompiledExpr
// ---------------------------------------------------------------------------

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slot_names) {
  std::map<AtomId, int> index;
  auto atom_index = [&](AtomId id, auto&& self) -> int {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    const Atom& a = detail::atom(id);
    AtomEval ae;
    switch (a.kind) {
      case AtomKind::symbol: {
        auto sit = std::find(slot_names.begin(), slot_names.end(), a.name);
        if (sit == slot_names.end())
          throw UnboundSymbolError("no slot for symbol '" + a.name + "'");
        ae.kind = AtomEval::Kind::slot;
        ae.slot = static_cast<int>(sit - slot_names.begin());
        break;
      }
      case AtomKind::fun:
        ae.kind = AtomEval::Kind::fun;
        ae.fun = a.fun;
        ae.sub = std::make_unique<CompiledExpr>(*a.arg, slot_names);
        break;
      case AtomKind::inv:
        ae.kind = AtomEval::Kind::inv;
        ae.sub = std::make_unique<CompiledExpr>(*a.base, slot_names);
        break;
    }
    int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(ae));
    index.emplace(id, idx);
    return idx;
  };

  for (const auto& [m, c] : e.poly()) {
    Term t;
    t.coeff = to_double(c);
    for (const auto& [id, k] : m) t.powers.emplace_back(atom_index(id, atom_index), k);
    terms_.push_back(std::move(t));
  }
}

double CompiledExpr::eval(const double* slots) const {
  // small fixed buffer covers every expression in this project
  double vals[64];
  const std::size_t n = atoms_.size();
  std::vector<double> heap;
  double* v = vals;
  if (n > 64) {
    heap.resize(n);
    v = heap.data();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const AtomEval& a = atoms_[i];
    switch (a.kind) {
      case AtomEval::Kind::slot:
        v[i] = slots[a.slot];
        break;
      case AtomEval::Kind::fun: {
        double arg = a.sub->eval(slots);
        switch (a.fun) {
          case FunKind::sin: v[i] = std::sin(arg); break;
          case FunKind::cos: v[i] = std::cos(arg); break;
          case FunKind::sinh: v[i] = std::sinh(arg); break;
          case FunKind::cosh: v[i] = std::cosh(arg); break;
          case FunKind::exp: v[i] = std::exp(arg); break;
        }
        break;
      }
      case AtomEval::Kind::inv: {
        double base = a.sub->eval(slots);
        if (base == 0.0) throw PoleError("inverse of zero while evaluating");
        v[i] = 1.0 / base;
        break;
      }
    }
  }
  double sum = 0.0;
  for (const Term& t : terms_) {
    double term = t.coeff;
    for (const auto& [idx, k] : t.powers) {
      double av = v[idx];
      if (k < 0 && av == 0.0) throw PoleError("zero base raised to a negative power");
      term *= std::pow(av, k);
    }
    sum += term;
  }
  return sum;
}

}  // namespace swsym
