#include "swsym/expr.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace swsym {

double to_double(const Rational& q) { return q.convert_to<double>(); }

const char* fun_name(FunKind f) {
  switch (f) {
    case FunKind::sin: return "sin";
    case FunKind::cos: return "cos";
    case FunKind::sinh: return "sinh";
    case FunKind::cosh: return "cosh";
    case FunKind::exp: return "exp";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// JetIndex
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kCoordOrder = "txyw";

int coord_rank(char c) {
  for (int i = 0; kCoordOrder[i]; ++i)
    if (kCoordOrder[i] == c) return i;
  return -1;
}
}  // namespace

int JetIndex::order() const {
  int n = 0;
  for (const auto& [c, k] : counts) n += k;
  return n;
}

std::string JetIndex::suffix() const {
  std::string s;
  for (int i = 0; kCoordOrder[i]; ++i) {
    auto it = counts.find(kCoordOrder[i]);
    if (it != counts.end()) s.append(static_cast<std::size_t>(it->second), kCoordOrder[i]);
  }
  return s;
}

JetIndex JetIndex::raised(char coord) const {
  JetIndex r = *this;
  r.counts[coord] += 1;
  return r;
}

// ---------------------------------------------------------------------------
// Atom registry
// ---------------------------------------------------------------------------

namespace detail {
namespace {

struct Registry {
  std::deque<Atom> atoms;
  std::unordered_map<std::string, AtomId> by_key;
  mutable std::shared_mutex mu;
};

Registry& reg() {
  static Registry* r = new Registry();
  return *r;
}

AtomId intern(Atom a) {
  Registry& r = reg();
  std::unique_lock lock(r.mu);
  if (auto it = r.by_key.find(a.key); it != r.by_key.end()) {
    if (a.kind == AtomKind::symbol) {
      const Atom& prev = r.atoms[it->second];
      if (prev.symbol_kind != a.symbol_kind || prev.jet_dep != a.jet_dep ||
          !(prev.jet_index == a.jet_index))
        throw ExprError("symbol name '" + a.name + "' reused with a different kind");
    }
    return it->second;
  }
  AtomId id = static_cast<AtomId>(r.atoms.size());
  r.by_key.emplace(a.key, id);
  r.atoms.push_back(std::move(a));
  return id;
}

}  // namespace

const Atom& atom(AtomId id) {
  Registry& r = reg();
  std::shared_lock lock(r.mu);
  return r.atoms[id];
}

namespace {

const std::string& atom_key(AtomId id) { return atom(id).key; }

bool key_less(AtomId a, AtomId b) {
  if (a == b) return false;
  return atom_key(a) < atom_key(b);
}

int total_degree(const Monomial& m) {
  int d = 0;
  for (const auto& [id, e] : m) d += e;
  return d;
}

}  // namespace

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size()) {
      if (a[i].first == b[j].first) {
        if (a[i].second != b[j].second) return a[i].second < b[j].second;
        ++i;
        ++j;
      } else if (key_less(a[i].first, b[j].first)) {
        return a[i].second < 0;
      } else {
        return b[j].second > 0;
      }
    } else if (i < a.size()) {
      return a[i].second < 0;
    } else {
      return b[j].second > 0;
    }
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Poly helpers
// ---------------------------------------------------------------------------

namespace {

using detail::Atom;
using detail::AtomKind;
using detail::Monomial;
using detail::Poly;

void poly_add_term(Poly& p, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = p.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

// Raw merge of exponent vectors; no canonical rewrites.
Monomial mono_merge_raw(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && detail::key_less(a[i].first, b[j].first))) {
      out.push_back(a[i++]);
    } else if (i >= a.size() || detail::key_less(b[j].first, a[i].first)) {
      out.push_back(b[j++]);
    } else {
      int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

int exponent_of(const Monomial& m, AtomId id) {
  for (const auto& [a, e] : m)
    if (a == id) return e;
  return 0;
}

Monomial mono_without(const Monomial& m, AtomId id) {
  Monomial out;
  out.reserve(m.size());
  for (const auto& pr : m)
    if (pr.first != id) out.push_back(pr);
  return out;
}

Monomial mono_single(AtomId id, int e) {
  Monomial m;
  if (e != 0) m.emplace_back(id, e);
  return m;
}

// p * (c * m), raw (no rewrites).
Poly poly_mul_raw(const Poly& p, const Monomial& m, const Rational& c) {
  Poly out;
  for (const auto& [mm, cc] : p) poly_add_term(out, mono_merge_raw(mm, m), cc * c);
  return out;
}

// Factor out the common Laurent monomial so all exponents become >= 0.
// Returns the factored-out monomial (with the negative exponents).
Monomial clear_laurent(Poly& p) {
  std::map<AtomId, int> mins;
  bool first = true;
  for (const auto& [m, c] : p) {
    std::map<AtomId, int> present;
    for (const auto& [id, e] : m) present[id] = e;
    if (first) {
      mins = present;
      first = false;
    } else {
      for (auto& [id, e] : mins) {
        auto it = present.find(id);
        e = std::min(e, it == present.end() ? 0 : it->second);
      }
      for (const auto& [id, e] : present)
        if (!mins.count(id)) mins[id] = std::min(0, e);
    }
  }
  Monomial m0;
  for (const auto& [id, e] : mins)
    if (e < 0) m0.emplace_back(id, e);
  std::sort(m0.begin(), m0.end(),
            [](const auto& a, const auto& b) { return detail::key_less(a.first, b.first); });
  if (!m0.empty()) {
    Monomial inv;
    inv.reserve(m0.size());
    for (const auto& [id, e] : m0) inv.emplace_back(id, -e);
    p = poly_mul_raw(p, inv, Rational(1));
  }
  return m0;
}

// Exact multivariate division in the free polynomial ring over atoms.
// Requires num and den to have only nonnegative exponents.
std::optional<Poly> exact_divide(const Poly& num, const Poly& den) {
  if (den.empty()) return std::nullopt;
  Poly r = num;
  Poly q;
  const auto& ltd = *den.rbegin();
  while (!r.empty()) {
    const auto& ltr = *r.rbegin();
    // monomial divisibility: exponents of ltd must not exceed those of ltr
    Monomial diff;
    {
      std::size_t i = 0, j = 0;
      const Monomial& a = ltr.first;
      const Monomial& b = ltd.first;
      bool ok = true;
      while (j < b.size()) {
        if (i >= a.size()) {
          ok = false;
          break;
        }
        if (a[i].first == b[j].first) {
          int e = a[i].second - b[j].second;
          if (e < 0) {
            ok = false;
            break;
          }
          if (e != 0) diff.emplace_back(a[i].first, e);
          ++i;
          ++j;
        } else if (detail::key_less(a[i].first, b[j].first)) {
          diff.push_back(a[i]);
          ++i;
        } else {
          ok = false;
          break;
        }
      }
      if (!ok) return std::nullopt;
      for (; i < a.size(); ++i) diff.push_back(a[i]);
    }
    Rational cq = ltr.second / ltd.second;
    poly_add_term(q, diff, cq);
    for (const auto& [m, c] : den) poly_add_term(r, mono_merge_raw(m, diff), -(c * cq));
  }
  return q;
}

bool has_inv_atoms(const Poly& p) {
  for (const auto& [m, c] : p)
    for (const auto& [id, e] : m)
      if (detail::atom(id).kind == AtomKind::inv) return true;
  return false;
}

// Cancel inverse atoms against divisible cofactors: Inv(Q)^k * B -> Inv(Q)^(k-1) * (B/Q)
// whenever Q exactly divides B.
void reduce_invs(Poly& p) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<AtomId> inv_ids;
    for (const auto& [m, c] : p)
      for (const auto& [id, e] : m)
        if (detail::atom(id).kind == AtomKind::inv &&
            std::find(inv_ids.begin(), inv_ids.end(), id) == inv_ids.end())
          inv_ids.push_back(id);
    for (AtomId id : inv_ids) {
      std::map<int, Poly> buckets;
      for (const auto& [m, c] : p) {
        int k = exponent_of(m, id);
        poly_add_term(buckets[k], mono_without(m, id), c);
      }
      const Poly& base = detail::atom(id).base->poly();
      bool local = false;
      int kmax = buckets.rbegin()->first;
      for (int k = kmax; k >= 1; --k) {
        auto it = buckets.find(k);
        if (it == buckets.end() || it->second.empty()) continue;
        Poly b = it->second;
        Monomial m0 = clear_laurent(b);
        if (auto quot = exact_divide(b, base)) {
          Poly lowered = poly_mul_raw(*quot, m0, Rational(1));
          buckets.erase(k);
          for (const auto& [m, c] : lowered) poly_add_term(buckets[k - 1], m, c);
          local = true;
        }
      }
      if (local) {
        Poly np;
        for (const auto& [k, bp] : buckets) {
          for (const auto& [m, c] : bp)
            poly_add_term(np, mono_merge_raw(m, mono_single(id, k)), c);
        }
        p = std::move(np);
        changed = true;
        break;
      }
    }
  }
}

void maybe_reduce_invs(Poly& p) {
  if (has_inv_atoms(p)) reduce_invs(p);
}

Poly poly_of_expr(const Expr& e) { return e.poly(); }

Poly poly_mul(const Poly& a, const Poly& b);
Poly fix_monomial(const Monomial& m, const Rational& c);

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) poly_add_term(out, m, c);
  maybe_reduce_invs(out);
  return out;
}

Poly poly_neg(const Poly& a) {
  Poly out;
  for (const auto& [m, c] : a) out.emplace(m, -c);
  return out;
}

Poly poly_pow(const Poly& a, int k) {
  Poly result;
  poly_add_term(result, Monomial{}, Rational(1));
  Poly base = a;
  int n = k;
  while (n > 0) {
    if (n & 1) result = poly_mul(result, base);
    n >>= 1;
    if (n) base = poly_mul(base, base);
  }
  return result;
}

// Rewrites a raw monomial into canonical form; may return several terms.
Poly fix_monomial(const Monomial& m, const Rational& c) {
  if (c == 0) return {};
  // 1. inverse atoms with negative exponents: replace Inv(Q)^-k by Q^k
  for (const auto& [id, e] : m) {
    if (detail::atom(id).kind == AtomKind::inv && e < 0) {
      Poly basek = poly_pow(detail::atom(id).base->poly(), -e);
      Poly rest = fix_monomial(mono_without(m, id), c);
      return poly_mul(rest, basek);
    }
  }
  // 2. fold exp atoms: exp(a)^j * exp(b)^k -> exp(j*a + k*b)
  {
    std::vector<std::pair<AtomId, int>> exps;
    for (const auto& [id, e] : m)
      if (detail::atom(id).kind == AtomKind::fun && detail::atom(id).fun == FunKind::exp)
        exps.emplace_back(id, e);
    if (exps.size() > 1 || (exps.size() == 1 && exps[0].second != 1)) {
      Expr arg(0L);
      Monomial rest = m;
      for (const auto& [id, e] : exps) {
        arg += Expr(static_cast<long>(e)) * (*detail::atom(id).arg);
        rest = mono_without(rest, id);
      }
      Expr folded = Expr::fun(FunKind::exp, arg);
      Poly out = fix_monomial(rest, c);
      return poly_mul(out, folded.poly());
    }
  }
  // 3. sin^2 -> 1 - cos^2
  for (const auto& [id, e] : m) {
    const Atom& a = detail::atom(id);
    if (a.kind == AtomKind::fun && a.fun == FunKind::sin && e >= 2) {
      const Expr& arg = *a.arg;
      Expr cos2 = Expr(1L) - Expr::fun(FunKind::cos, arg).pow(2);
      Poly pyth = poly_pow(cos2.poly(), e / 2);
      Monomial rest = mono_without(m, id);
      if (e % 2) rest = mono_merge_raw(rest, mono_single(id, 1));
      Poly out = fix_monomial(rest, c);
      return poly_mul(out, pyth);
    }
  }
  Poly out;
  out.emplace(m, c);
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [m1, c1] : a) {
    for (const auto& [m2, c2] : b) {
      Monomial m = mono_merge_raw(m1, m2);
      Rational c = c1 * c2;
      bool needs_fix = false;
      for (const auto& [id, e] : m) {
        const Atom& at = detail::atom(id);
        if (at.kind == AtomKind::fun &&
            ((at.fun == FunKind::sin && e >= 2) || (at.fun == FunKind::exp && e != 1)))
          needs_fix = true;
        if (at.kind == AtomKind::inv && e < 0) needs_fix = true;
      }
      // more than one exp atom in a single monomial also needs folding
      if (!needs_fix) {
        int nexp = 0;
        for (const auto& [id, e] : m)
          if (detail::atom(id).kind == AtomKind::fun && detail::atom(id).fun == FunKind::exp)
            ++nexp;
        if (nexp > 1) needs_fix = true;
      }
      if (!needs_fix) {
        poly_add_term(out, m, c);
      } else {
        for (const auto& [mm, cc] : fix_monomial(m, c)) poly_add_term(out, mm, cc);
      }
    }
  }
  maybe_reduce_invs(out);
  return out;
}

Rational rational_content(const Poly& p) {
  using boost::multiprecision::cpp_int;
  cpp_int g = 0, l = 1;
  for (const auto& [m, c] : p) {
    g = gcd(g, numerator(c) < 0 ? cpp_int(-numerator(c)) : numerator(c));
    l = lcm(l, denominator(c));
  }
  if (g == 0) g = 1;
  return Rational(g, l);
}

std::shared_ptr<const Poly> shared_poly(Poly p) {
  return std::make_shared<const Poly>(std::move(p));
}

const std::shared_ptr<const Poly>& zero_poly() {
  static const std::shared_ptr<const Poly> z = shared_poly(Poly{});
  return z;
}

std::string print_poly(const Poly& p);

}  // namespace

// ---------------------------------------------------------------------------
// Expr construction
// ---------------------------------------------------------------------------

Expr::Expr() : p_(zero_poly()) {}

Expr::Expr(long n) {
  if (n == 0) {
    p_ = zero_poly();
  } else {
    Poly p;
    p.emplace(Monomial{}, Rational(n));
    p_ = shared_poly(std::move(p));
  }
}

Expr::Expr(const Rational& q) {
  if (q == 0) {
    p_ = zero_poly();
  } else {
    Poly p;
    p.emplace(Monomial{}, q);
    p_ = shared_poly(std::move(p));
  }
}

Expr Expr::rational(long num, long den) {
  if (den == 0) throw PoleError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Expr(Rational(num, den));
}

namespace {

Expr single_atom_expr(AtomId id) {
  Poly p;
  p.emplace(mono_single(id, 1), Rational(1));
  return Expr::from_poly(std::move(p));
}

Expr make_symbol(std::string name, SymbolKind kind, char dep, JetIndex index) {
  Atom a;
  a.kind = AtomKind::symbol;
  a.name = std::move(name);
  a.symbol_kind = kind;
  a.jet_dep = dep;
  a.jet_index = std::move(index);
  a.key = "s:" + a.name;
  return single_atom_expr(detail::intern(std::move(a)));
}

}  // namespace

Expr Expr::parameter(const std::string& name) {
  if (name.empty()) throw ExprError("empty parameter name");
  return make_symbol(name, SymbolKind::parameter, 0, {});
}

Expr Expr::coordinate(char c) {
  if (coord_rank(c) < 0) throw ExprError(std::string("unknown coordinate '") + c + "'");
  return make_symbol(std::string(1, c), SymbolKind::coordinate, 0, {});
}

Expr Expr::dependent(char dep) { return jet(dep, JetIndex{}); }

Expr Expr::jet(char dep, const std::string& coords) {
  JetIndex idx;
  for (char c : coords) {
    if (coord_rank(c) < 0) throw ExprError(std::string("unknown coordinate '") + c + "' in jet index");
    idx.counts[c] += 1;
  }
  return jet(dep, idx);
}

Expr Expr::jet(char dep, const JetIndex& index) {
  static const std::string deps = "uvhHUV";
  if (deps.find(dep) == std::string::npos)
    throw ExprError(std::string("unknown dependent variable '") + dep + "'");
  std::string name(1, dep);
  const std::string suffix = index.suffix();
  if (!suffix.empty()) name += "_" + suffix;
  return make_symbol(name, SymbolKind::jet_variable, dep, index);
}

Expr Expr::integration_constant(const std::string& name) {
  if (name.empty()) throw ExprError("empty integration-constant name");
  return make_symbol(name, SymbolKind::integration_constant, 0, {});
}

Expr Expr::fun(FunKind f, const Expr& arg) {
  if (arg.is_zero()) {
    switch (f) {
      case FunKind::sin:
      case FunKind::sinh:
        return Expr(0L);
      case FunKind::cos:
      case FunKind::cosh:
      case FunKind::exp:
        return Expr(1L);
    }
  }
  // sign-normalize odd/even function arguments by the leading coefficient
  if (f != FunKind::exp) {
    const Rational& lead = arg.poly().rbegin()->second;
    if (lead < 0) {
      Expr inner = fun(f, -arg);
      if (f == FunKind::sin || f == FunKind::sinh) return -inner;
      return inner;
    }
  }
  Atom a;
  a.kind = AtomKind::fun;
  a.fun = f;
  a.arg = std::make_shared<const Expr>(arg);
  a.key = std::string("f:") + fun_name(f) + ":(" + arg.str() + ")";
  return single_atom_expr(detail::intern(std::move(a)));
}

Expr Expr::from_poly(Poly p) {
  // re-canonicalize defensively: callers may hand back raw monomials
  bool clean = true;
  for (const auto& [m, c] : p) {
    if (c == 0) clean = false;
    for (const auto& [id, e] : m) {
      const Atom& at = detail::atom(id);
      if (e == 0) clean = false;
      if (at.kind == AtomKind::fun && at.fun == FunKind::sin && e >= 2) clean = false;
      if (at.kind == AtomKind::fun && at.fun == FunKind::exp && e != 1) clean = false;
      if (at.kind == AtomKind::inv && e < 0) clean = false;
    }
  }
  if (!clean) {
    Poly out;
    for (const auto& [m, c] : p)
      for (const auto& [mm, cc] : fix_monomial(m, c)) poly_add_term(out, mm, cc);
    p = std::move(out);
  }
  maybe_reduce_invs(p);
  if (p.empty()) return Expr();
  Expr e;
  e.p_ = shared_poly(std::move(p));
  return e;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

bool Expr::is_zero() const { return p_->empty(); }

bool Expr::is_one() const {
  return p_->size() == 1 && p_->begin()->first.empty() && p_->begin()->second == 1;
}

bool Expr::is_rational() const {
  return p_->empty() || (p_->size() == 1 && p_->begin()->first.empty());
}

std::optional<Rational> Expr::as_rational() const {
  if (p_->empty()) return Rational(0);
  if (p_->size() == 1 && p_->begin()->first.empty()) return p_->begin()->second;
  return std::nullopt;
}

std::size_t Expr::term_count() const { return p_->size(); }

bool Expr::operator==(const Expr& other) const {
  if (p_ == other.p_) return true;
  return *p_ == *other.p_;
}

std::optional<SymbolInfo> as_symbol(const Expr& e) {
  const Poly& p = e.poly();
  if (p.size() != 1) return std::nullopt;
  const auto& [m, c] = *p.begin();
  if (c != 1 || m.size() != 1 || m[0].second != 1) return std::nullopt;
  const Atom& a = detail::atom(m[0].first);
  if (a.kind != AtomKind::symbol) return std::nullopt;
  SymbolInfo info;
  info.name = a.name;
  info.kind = a.symbol_kind;
  info.jet_dep = a.jet_dep;
  info.jet_index = a.jet_index;
  return info;
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  Poly p = poly_add(*a.p_, *b.p_);
  if (p.empty()) return Expr();
  Expr e;
  e.p_ = shared_poly(std::move(p));
  return e;
}

Expr operator-(const Expr& a) {
  if (a.is_zero()) return a;
  Expr e;
  e.p_ = shared_poly(poly_neg(*a.p_));
  return e;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  Poly p = poly_mul(*a.p_, *b.p_);
  if (p.empty()) return Expr();
  Expr e;
  e.p_ = shared_poly(std::move(p));
  return e;
}

Expr Expr::pow(int k) const {
  if (k == 0) return Expr(1L);
  if (k < 0) return Expr(1L) / pow(-k);
  if (is_zero()) return Expr();
  Expr e;
  e.p_ = shared_poly(poly_pow(*p_, k));
  return e;
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw PoleError("division by zero expression");
  if (auto q = b.as_rational()) {
    return a * Expr(Rational(1) / *q);
  }
  // Clear inverse atoms and Laurent negatives out of the divisor.
  Expr clear(1L);
  {
    std::map<AtomId, int> inv_max;
    std::map<AtomId, int> neg_min;
    for (const auto& [m, c] : b.poly()) {
      for (const auto& [id, e] : m) {
        if (detail::atom(id).kind == AtomKind::inv)
          inv_max[id] = std::max(inv_max[id], e);
        else if (e < 0)
          neg_min[id] = std::min(neg_min[id], e);
      }
    }
    for (const auto& [id, k] : inv_max) clear *= detail::atom(id).base->pow(k);
    for (const auto& [id, e] : neg_min) clear *= single_atom_expr(id).pow(-e);
  }
  Expr num = a * clear;
  Expr den = b * clear;
  if (auto q = den.as_rational()) {
    if (*q == 0) throw PoleError("division by zero expression");
    return num * Expr(Rational(1) / *q);
  }
  const Poly& dp = den.poly();
  if (dp.size() == 1) {
    // single-term divisor: invert the monomial directly
    const auto& [m, c] = *dp.begin();
    Poly inv;
    Monomial neg;
    neg.reserve(m.size());
    for (const auto& [id, e] : m) neg.emplace_back(id, -e);
    for (const auto& [mm, cc] : fix_monomial(neg, Rational(1) / c))
      poly_add_term(inv, mm, cc);
    return num * Expr::from_poly(std::move(inv));
  }
  // multi-term divisor: primitive part becomes an inverse atom
  Rational content = rational_content(dp);
  if (dp.rbegin()->second < 0) content = -content;
  Poly prim;
  for (const auto& [m, c] : dp) prim.emplace(m, c / content);
  Monomial mc;  // monomial content (all exponents >= 0 after clearing)
  {
    std::map<AtomId, int> mins;
    bool first = true;
    for (const auto& [m, c] : prim) {
      std::map<AtomId, int> present;
      for (const auto& [id, e] : m) present[id] = e;
      if (first) {
        mins = present;
        first = false;
      } else {
        for (auto it = mins.begin(); it != mins.end();) {
          auto jt = present.find(it->first);
          if (jt == present.end()) {
            it = mins.erase(it);
          } else {
            it->second = std::min(it->second, jt->second);
            ++it;
          }
        }
      }
    }
    for (const auto& [id, e] : mins)
      if (e > 0) mc.emplace_back(id, e);
    std::sort(mc.begin(), mc.end(),
              [](const auto& x, const auto& y) { return detail::key_less(x.first, y.first); });
  }
  if (!mc.empty()) {
    Monomial inv_mc;
    inv_mc.reserve(mc.size());
    for (const auto& [id, e] : mc) inv_mc.emplace_back(id, -e);
    prim = poly_mul_raw(prim, inv_mc, Rational(1));
  }
  Expr base = Expr::from_poly(prim);
  Atom ia;
  ia.kind = AtomKind::inv;
  ia.base = std::make_shared<const Expr>(base);
  ia.key = "i:(" + base.str() + ")";
  AtomId iid = detail::intern(std::move(ia));

  Poly factor;
  {
    Monomial m = mono_single(iid, 1);
    Monomial inv_mc;
    inv_mc.reserve(mc.size());
    for (const auto& [id, e] : mc) inv_mc.emplace_back(id, -e);
    m = mono_merge_raw(m, inv_mc);
    factor.emplace(std::move(m), Rational(1) / content);
  }
  return num * Expr::from_poly(std::move(factor));
}

Expr normalize(const Expr& e) { return e; }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string rational_str(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

std::string atom_base_str(AtomId id) {
  const Atom& a = detail::atom(id);
  switch (a.kind) {
    case AtomKind::symbol:
      return a.name;
    case AtomKind::fun:
      return std::string(fun_name(a.fun)) + "(" + a.arg->str() + ")";
    case AtomKind::inv:
      return "(" + a.base->str() + ")";
  }
  return "?";
}

std::string term_str(const Monomial& m, const Rational& coeff_abs) {
  if (m.empty()) return rational_str(coeff_abs);
  std::vector<std::string> parts;
  if (coeff_abs != 1) parts.push_back(rational_str(coeff_abs));
  for (const auto& [id, e] : m) {
    std::string s = atom_base_str(id);
    int shown = detail::atom(id).kind == AtomKind::inv ? -e : e;
    if (shown != 1) s += "^" + std::to_string(shown);
    parts.push_back(std::move(s));
  }
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "*";
    out += parts[i];
  }
  return out;
}

std::string print_poly(const Poly& p) {
  if (p.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    const bool neg = it->second < 0;
    const Rational cabs = neg ? Rational(-it->second) : it->second;
    if (first) {
      if (neg) out += "-";
      first = false;
    } else {
      out += neg ? " - " : " + ";
    }
    out += term_str(it->first, cabs);
  }
  return out;
}

}  // namespace

std::string Expr::str() const { return print_poly(*p_); }

std::string to_string(const Expr& e) { return e.str(); }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

}  // namespace swsym
