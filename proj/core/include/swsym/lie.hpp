#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swsym/model.hpp"
#include "swsym/vectorfield.hpp"

namespace swsym {

// Action of the (unprolonged) field on a jet-order-0 expression:
//   X f = sum_i xi^i df/di + sum_A eta^A df/dA.
Expr vf_apply(const VectorField& V, const Expr& f);

// First-prolongation coefficients
//   eta^{A[1]}_i = D_i eta^A - sum_j (d A / d x_j jet) * D_i xi^j,
// keyed by (dependent, coordinate); each has jet order <= 1.
std::map<std::pair<char, char>, Expr> prolong1(const VectorField& V, const PdeSystem& sys);

// Residuals of the linearized symmetry condition: apply the prolonged field
// to each equation H^A = A_t - RHS_A, then substitute the solved time
// derivatives to restrict to the solution manifold.  V is a symmetry of sys
// iff all three normal forms are zero.
std::vector<Expr> symmetry_residuals(const VectorField& V, const PdeSystem& sys);

struct SymmetryVerdict {
  bool ok = false;
  std::vector<Expr> residuals;  // one per dependent, order h,u,v
};

SymmetryVerdict is_symmetry(const VectorField& V, const PdeSystem& sys);

// Largest |residual| over the sample points; each point binds coordinates,
// dependents, first jets, and parameters by name.  Used as an independent
// numeric screen beside the symbolic zero test.
double max_residual_numeric(const VectorField& V, const PdeSystem& sys,
                            const std::vector<std::map<std::string, double>>& points);

// Commutator [V, W] componentwise over all six slots: [V,W]^c = V(W^c) - W(V^c).
VectorField vf_commutator(const VectorField& V, const VectorField& W);

// ---------------------------------------------------------------------------
// Repair search for defective catalog entries
// ---------------------------------------------------------------------------
//
// When a printed generator fails the symmetry check, search over a small
// documented set of token-level edits for a variant that verifies:
//   - insert a factor h into one term of one slot,
//   - replace u by v (or v by u) in one term of one slot,
//   - double or halve one rotation-degree-homogeneous part of one slot,
//   - flip the sign of one term of one slot.
// Up to `max_moves` edits are combined (the residual map is linear in the
// field, so candidate residuals are sums of precomputed per-edit residuals).
// The first verifying candidate in the documented enumeration order wins.

struct CorrectionResult {
  bool found = false;
  VectorField corrected;            // meaningful only when found
  std::vector<std::string> moves;   // human-readable applied edits
};

CorrectionResult search_corrections(const VectorField& V, const PdeSystem& sys,
                                    int max_moves = 2);

}  // namespace swsym
