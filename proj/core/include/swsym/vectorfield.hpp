#pragma once

#include <map>
#include <string>
#include <vector>

#include "swsym/expr.hpp"

namespace swsym {

// Infinitesimal point-transformation generator
//   X = xi^t d_t + xi^x d_x + xi^y d_y + eta^u d_u + eta^v d_v + eta^h d_h
// with all six components functions of (t, x, y, u, v, h) only (jet order 0).
struct VectorField {
  std::string label;
  std::map<char, Expr> xi;   // keys: t, x, y
  std::map<char, Expr> eta;  // keys: u, v, h

  const Expr& xi_at(char c) const;
  const Expr& eta_at(char c) const;
  bool is_zero() const;

  VectorField with_label(std::string l) const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const Expr& c, const VectorField& v);

bool operator==(const VectorField& a, const VectorField& b);

// Display form "t*d_t + x*d_x" / "sin(2*Omega*t)*d_x + ...".
std::string vf_display(const VectorField& v);

// Named generator catalogs for the three systems.  The pole catalog takes
// the rotation rate (symbolic or numeric) because its trig entries carry
// 2*Omega*t arguments.  All entries are the literal printed forms; the
// verification layer reports and repairs the two known defective entries.
std::vector<VectorField> catalog_general();                 // X1..X3
std::vector<VectorField> catalog_equator();                 // Y1..Y5
std::vector<VectorField> catalog_pole(const Expr& omega);   // Z1..Z9

// Pole catalog with the two defective entries repaired (the forms the
// symmetry checker confirms): in the second-to-last generator the cosine
// term of eta^v reads v, not u; in the last one eta^h carries a factor h and
// the quadratic-rotation part of eta^v carries 2*Omega, not Omega.
std::vector<VectorField> catalog_pole_corrected(const Expr& omega);

}  // namespace swsym
