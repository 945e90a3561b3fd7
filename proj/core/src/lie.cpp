#include "swsym/lie.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swsym/calculus.hpp"

namespace swsym {

namespace {
const char* kXiSlots = "txy";
const char* kEtaSlots = "uvh";
}  // namespace

Expr vf_apply(const VectorField& V, const Expr& f) {
  Expr out;
  for (const char* p = kXiSlots; *p; ++p) {
    const Expr& c = V.xi_at(*p);
    if (!c.is_zero()) out += c * diff(f, Expr::coordinate(*p));
  }
  for (const char* p = kEtaSlots; *p; ++p) {
    const Expr& c = V.eta_at(*p);
    if (!c.is_zero()) out += c * diff(f, Expr::dependent(*p));
  }
  return out;
}

std::map<std::pair<char, char>, Expr> prolong1(const VectorField& V, const PdeSystem& sys) {
  std::map<std::pair<char, char>, Expr> out;
  for (char dep : sys.dependents) {
    Expr eta = V.eta_at(dep);
    for (char i : sys.independent) {
      Expr coeff = total_derivative(eta, i);
      for (char j : sys.independent) {
        const Expr& xi = V.xi_at(j);
        if (xi.is_zero()) continue;
        coeff -= Expr::jet(dep, std::string(1, j)) * total_derivative(xi, i);
      }
      out[{dep, i}] = coeff;
    }
  }
  return out;
}

std::vector<Expr> symmetry_residuals(const VectorField& V, const PdeSystem& sys) {
  auto pro = prolong1(V, sys);

  std::map<std::string, Expr> manifold;
  for (char dep : sys.dependents)
    manifold.emplace(std::string(1, dep) + "_t", sys.solved_rhs.at(dep));

  std::vector<Expr> residuals;
  residuals.reserve(sys.dependents.size());
  for (char dep : sys.dependents) {
    Expr H = Expr::jet(dep, "t") - sys.solved_rhs.at(dep);
    // X^[1] H = X H + sum_{B,i} eta^{B[1]}_i dH/dB_i
    Expr applied = vf_apply(V, H);
    for (char B : sys.dependents) {
      for (char i : sys.independent) {
        Expr dH = diff(H, Expr::jet(B, std::string(1, i)));
        if (dH.is_zero()) continue;
        applied += pro.at({B, i}) * dH;
      }
    }
    residuals.push_back(substitute(applied, manifold));
  }
  return residuals;
}

SymmetryVerdict is_symmetry(const VectorField& V, const PdeSystem& sys) {
  SymmetryVerdict verdict;
  verdict.residuals = symmetry_residuals(V, sys);
  verdict.ok = std::all_of(verdict.residuals.begin(), verdict.residuals.end(),
                           [](const Expr& e) { return e.is_zero(); });
  return verdict;
}

double max_residual_numeric(const VectorField& V, const PdeSystem& sys,
                            const std::vector<std::map<std::string, double>>& points) {
  auto residuals = symmetry_residuals(V, sys);
  double worst = 0.0;
  for (const auto& point : points)
    for (const Expr& r : residuals)
      worst = std::max(worst, std::abs(eval_numeric(r, point)));
  return worst;
}

VectorField vf_commutator(const VectorField& V, const VectorField& W) {
  VectorField out;
  for (const char* p = kXiSlots; *p; ++p) {
    Expr e = vf_apply(V, W.xi_at(*p)) - vf_apply(W, V.xi_at(*p));
    if (!e.is_zero()) out.xi[*p] = e;
  }
  for (const char* p = kEtaSlots; *p; ++p) {
    Expr e = vf_apply(V, W.eta_at(*p)) - vf_apply(W, V.eta_at(*p));
    if (!e.is_zero()) out.eta[*p] = e;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repair search
// ---------------------------------------------------------------------------

namespace {

struct Move {
  std::string description;
  char slot = 0;          // one of t,x,y,u,v,h
  bool slot_is_xi = false;
  Expr delta;             // edit expressed additively: slot' = slot + delta
};

Expr slot_of(const VectorField& V, char slot, bool is_xi) {
  return is_xi ? V.xi_at(slot) : V.eta_at(slot);
}

VectorField apply_delta(VectorField V, const Move& m) {
  if (m.slot_is_xi) {
    Expr e = V.xi_at(m.slot) + m.delta;
    if (e.is_zero())
      V.xi.erase(m.slot);
    else
      V.xi[m.slot] = e;
  } else {
    Expr e = V.eta_at(m.slot) + m.delta;
    if (e.is_zero())
      V.eta.erase(m.slot);
    else
      V.eta[m.slot] = e;
  }
  return V;
}

// Terms of e in printed (descending) order, as standalone expressions.
std::vector<Expr> terms_of(const Expr& e) {
  std::vector<Expr> out;
  const auto& p = e.poly();
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    detail::Poly single;
    single.emplace(it->first, it->second);
    out.push_back(Expr::from_poly(std::move(single)));
  }
  return out;
}

std::string slot_name(char slot, bool is_xi) {
  return std::string(is_xi ? "xi^" : "eta^") + slot;
}

// Enumerate candidate edits of one field in the documented order.
std::vector<Move> enumerate_moves(const VectorField& V) {
  std::vector<Move> moves;
  Expr u = Expr::dependent('u');
  Expr v = Expr::dependent('v');
  Expr h = Expr::dependent('h');

  struct SlotRef {
    char slot;
    bool is_xi;
  };
  std::vector<SlotRef> slots;
  for (const char* p = kXiSlots; *p; ++p) slots.push_back({*p, true});
  for (const char* p = kEtaSlots; *p; ++p) slots.push_back({*p, false});

  auto for_terms = [&](const SlotRef& s, auto&& fn) {
    Expr e = slot_of(V, s.slot, s.is_xi);
    auto ts = terms_of(e);
    for (std::size_t i = 0; i < ts.size(); ++i) fn(static_cast<int>(i) + 1, ts[i]);
  };

  // 1. insert a factor h into one term
  for (const auto& s : slots) {
    for_terms(s, [&](int idx, const Expr& term) {
      Move m;
      m.slot = s.slot;
      m.slot_is_xi = s.is_xi;
      m.delta = term * h - term;
      std::ostringstream os;
      os << slot_name(s.slot, s.is_xi) << ": multiply term " << idx << " (" << term.str()
         << ") by h";
      m.description = os.str();
      moves.push_back(std::move(m));
    });
  }

  // 2. swap u <-> v in one term
  for (const auto& s : slots) {
    for_terms(s, [&](int idx, const Expr& term) {
      if (contains_symbol(term, "u")) {
        Move m;
        m.slot = s.slot;
        m.slot_is_xi = s.is_xi;
        m.delta = substitute(term, {{"u", v}}) - term;
        std::ostringstream os;
        os << slot_name(s.slot, s.is_xi) << ": replace u by v in term " << idx << " ("
           << term.str() << ")";
        m.description = os.str();
        moves.push_back(std::move(m));
      }
      if (contains_symbol(term, "v")) {
        Move m;
        m.slot = s.slot;
        m.slot_is_xi = s.is_xi;
        m.delta = substitute(term, {{"v", u}}) - term;
        std::ostringstream os;
        os << slot_name(s.slot, s.is_xi) << ": replace v by u in term " << idx << " ("
           << term.str() << ")";
        m.description = os.str();
        moves.push_back(std::move(m));
      }
    });
  }

  // 3. double or halve one rotation-degree-homogeneous part of a slot
  for (const auto& s : slots) {
    Expr e = slot_of(V, s.slot, s.is_xi);
    if (e.is_zero()) continue;
    std::map<int, Expr> by_degree;
    for (const auto& [mono, c] : e.poly()) {
      int deg = 0;
      for (const auto& [id, k] : mono)
        if (detail::atom(id).kind == detail::AtomKind::symbol && detail::atom(id).name == "Omega")
          deg = k;
      detail::Poly single;
      single.emplace(mono, c);
      by_degree[deg] += Expr::from_poly(std::move(single));
    }
    if (by_degree.size() < 2) continue;  // rescaling the whole slot is just a rescale
    for (const auto& [deg, part] : by_degree) {
      for (int dir = 0; dir < 2; ++dir) {
        Move m;
        m.slot = s.slot;
        m.slot_is_xi = s.is_xi;
        m.delta = dir == 0 ? part : Expr::rational(-1, 2) * part;
        std::ostringstream os;
        os << slot_name(s.slot, s.is_xi) << ": " << (dir == 0 ? "double" : "halve")
           << " the Omega-degree-" << deg << " part (" << part.str() << ")";
        m.description = os.str();
        moves.push_back(std::move(m));
      }
    }
  }

  // 4. flip the sign of one term
  for (const auto& s : slots) {
    for_terms(s, [&](int idx, const Expr& term) {
      Move m;
      m.slot = s.slot;
      m.slot_is_xi = s.is_xi;
      m.delta = Expr(-2L) * term;
      std::ostringstream os;
      os << slot_name(s.slot, s.is_xi) << ": flip the sign of term " << idx << " ("
         << term.str() << ")";
      m.description = os.str();
      moves.push_back(std::move(m));
    });
  }

  return moves;
}

bool all_zero(const std::vector<Expr>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const Expr& e) { return e.is_zero(); });
}

}  // namespace

CorrectionResult search_corrections(const VectorField& V, const PdeSystem& sys, int max_moves) {
  CorrectionResult result;
  std::vector<Expr> base = symmetry_residuals(V, sys);
  if (all_zero(base)) {
    result.found = true;
    result.corrected = V;
    return result;
  }
  if (max_moves < 1) return result;

  std::vector<Move> moves = enumerate_moves(V);

  // The residual map is linear in the field, so residuals of an edited field
  // are base + sum of per-edit residuals; precompute those once.
  std::vector<std::vector<Expr>> move_res;
  move_res.reserve(moves.size());
  for (const Move& m : moves) {
    VectorField delta_field;
    if (m.slot_is_xi)
      delta_field.xi[m.slot] = m.delta;
    else
      delta_field.eta[m.slot] = m.delta;
    move_res.push_back(symmetry_residuals(delta_field, sys));
  }

  auto candidate_ok = [&](const std::vector<std::size_t>& picked) {
    for (std::size_t eq = 0; eq < base.size(); ++eq) {
      Expr r = base[eq];
      for (std::size_t mi : picked) r += move_res[mi][eq];
      if (!r.is_zero()) return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < moves.size(); ++i) {
    if (candidate_ok({i})) {
      result.found = true;
      result.corrected = apply_delta(V, moves[i]).with_label(V.label);
      result.moves = {moves[i].description};
      return result;
    }
  }
  if (max_moves < 2) return result;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    for (std::size_t j = i; j < moves.size(); ++j) {
      if (candidate_ok({i, j})) {
        result.found = true;
        result.corrected =
            apply_delta(apply_delta(V, moves[i]), moves[j]).with_label(V.label);
        result.moves = {moves[i].description, moves[j].description};
        return result;
      }
    }
  }
  return result;
}

}  // namespace swsym
