#include "swsym/vectorfield.hpp"

#include <sstream>

namespace swsym {

namespace {
const Expr& zero_expr() {
  static const Expr z;
  return z;
}
const char* kXiSlots = "txy";
const char* kEtaSlots = "uvh";
}  // namespace

const Expr& VectorField::xi_at(char c) const {
  auto it = xi.find(c);
  return it == xi.end() ? zero_expr() : it->second;
}

const Expr& VectorField::eta_at(char c) const {
  auto it = eta.find(c);
  return it == eta.end() ? zero_expr() : it->second;
}

bool VectorField::is_zero() const {
  for (const auto& [c, e] : xi)
    if (!e.is_zero()) return false;
  for (const auto& [c, e] : eta)
    if (!e.is_zero()) return false;
  return true;
}

VectorField VectorField::with_label(std::string l) const {
  VectorField v = *this;
  v.label = std::move(l);
  return v;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  VectorField out;
  for (const char* p = kXiSlots; *p; ++p) {
    Expr e = a.xi_at(*p) + b.xi_at(*p);
    if (!e.is_zero()) out.xi[*p] = e;
  }
  for (const char* p = kEtaSlots; *p; ++p) {
    Expr e = a.eta_at(*p) + b.eta_at(*p);
    if (!e.is_zero()) out.eta[*p] = e;
  }
  return out;
}

VectorField operator*(const Expr& c, const VectorField& v) {
  VectorField out;
  for (const auto& [s, e] : v.xi) {
    Expr p = c * e;
    if (!p.is_zero()) out.xi[s] = p;
  }
  for (const auto& [s, e] : v.eta) {
    Expr p = c * e;
    if (!p.is_zero()) out.eta[s] = p;
  }
  return out;
}

VectorField operator-(const VectorField& a) { return Expr(-1L) * a; }

VectorField operator-(const VectorField& a, const VectorField& b) { return a + (-b); }

bool operator==(const VectorField& a, const VectorField& b) {
  for (const char* p = kXiSlots; *p; ++p)
    if (a.xi_at(*p) != b.xi_at(*p)) return false;
  for (const char* p = kEtaSlots; *p; ++p)
    if (a.eta_at(*p) != b.eta_at(*p)) return false;
  return true;
}

std::string vf_display(const VectorField& v) {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](char slot, const Expr& e) {
    if (e.is_zero()) return;
    if (!first) os << " + ";
    first = false;
    if (e.is_one()) {
      os << "d_" << slot;
    } else if (e.term_count() == 1) {
      os << e.str() << "*d_" << slot;
    } else {
      os << "(" << e.str() << ")*d_" << slot;
    }
  };
  for (const char* p = kXiSlots; *p; ++p) emit(*p, v.xi_at(*p));
  for (const char* p = kEtaSlots; *p; ++p) emit(*p, v.eta_at(*p));
  if (first) return "0";
  return os.str();
}

namespace {

VectorField d(char slot, const char* label = "") {
  VectorField v;
  v.label = label;
  if (slot == 't' || slot == 'x' || slot == 'y')
    v.xi[slot] = Expr(1L);
  else
    v.eta[slot] = Expr(1L);
  return v;
}

}  // namespace

std::vector<VectorField> catalog_general() {
  return {d('t', "X1"), d('x', "X2"), d('y', "X3")};
}

std::vector<VectorField> catalog_equator() {
  Expr t = Expr::coordinate('t');
  Expr x = Expr::coordinate('x');
  Expr y = Expr::coordinate('y');

  VectorField y4;
  y4.label = "Y4";
  y4.xi = {{'t', t}, {'x', x}, {'y', y}};

  VectorField y5;  // t*d_y + d_v
  y5.label = "Y5";
  y5.xi = {{'y', t}};
  y5.eta = {{'v', Expr(1L)}};

  return {d('t', "Y1"), d('x', "Y2"), d('y', "Y3"), y4, y5};
}

std::vector<VectorField> catalog_pole(const Expr& omega) {
  Expr t = Expr::coordinate('t');
  Expr x = Expr::coordinate('x');
  Expr y = Expr::coordinate('y');
  Expr u = Expr::dependent('u');
  Expr v = Expr::dependent('v');
  Expr h = Expr::dependent('h');
  Expr s = sin(2 * omega * t);
  Expr c = cos(2 * omega * t);

  VectorField z4;
  z4.label = "Z4";
  z4.xi = {{'x', x}, {'y', y}};
  z4.eta = {{'u', u}, {'v', v}, {'h', 2 * h}};

  VectorField z5;
  z5.label = "Z5";
  z5.xi = {{'x', y}, {'y', -x}};
  z5.eta = {{'u', v}, {'v', -u}};

  VectorField z6;
  z6.label = "Z6";
  z6.xi = {{'x', s}, {'y', c}};
  z6.eta = {{'u', 2 * omega * c}, {'v', -2 * omega * s}};

  VectorField z7;
  z7.label = "Z7";
  z7.xi = {{'x', -c}, {'y', s}};
  z7.eta = {{'u', 2 * omega * s}, {'v', 2 * omega * c}};

  VectorField z8;
  z8.label = "Z8";
  z8.xi = {{'t', s}, {'x', omega * (x * c + y * s)}, {'y', -omega * (x * s - y * c)}};
  z8.eta = {{'u', -omega * (u * c - v * s - 2 * omega * (y * c - x * s))},
            {'v', -omega * (u * s + u * c + 2 * omega * (y * s + x * c))},
            {'h', -2 * omega * h * c}};

  VectorField z9;
  z9.label = "Z9";
  z9.xi = {{'t', c}, {'x', omega * (y * c - x * s)}, {'y', -omega * (x * c + y * s)}};
  z9.eta = {{'u', omega * (u * s + v * c - 2 * omega * (x * c + y * s))},
            {'v', omega * (-u * c + v * s + omega * (x * s - y * c))},
            {'h', 2 * omega * s}};

  return {d('t', "Z1"), d('x', "Z2"), d('y', "Z3"), z4, z5, z6, z7, z8, z9};
}

std::vector<VectorField> catalog_pole_corrected(const Expr& omega) {
  Expr t = Expr::coordinate('t');
  Expr x = Expr::coordinate('x');
  Expr y = Expr::coordinate('y');
  Expr u = Expr::dependent('u');
  Expr v = Expr::dependent('v');
  Expr h = Expr::dependent('h');
  Expr s = sin(2 * omega * t);
  Expr c = cos(2 * omega * t);

  std::vector<VectorField> zs = catalog_pole(omega);
  zs[7].eta['v'] = -omega * (u * s + v * c + 2 * omega * (y * s + x * c));
  zs[8].eta['v'] = omega * (-u * c + v * s + 2 * omega * (x * s - y * c));
  zs[8].eta['h'] = 2 * omega * h * s;
  return zs;
}

}  // namespace swsym
