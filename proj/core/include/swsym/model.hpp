#pragma once

#include <map>
#include <string>
#include <vector>

#include "swsym/expr.hpp"

namespace swsym {

enum class SystemLabel { general, equator, pole };

const char* system_name(SystemLabel s);

// Reading of the v-advection term in the u-momentum equation.  The printed
// source carries v*u_x there; the standard equations (and the symmetry
// catalog) require v*u_y.  `corrected` is the default everywhere; `literal`
// exists so the findings report can demonstrate the difference.
enum class AdvectionReading { corrected, literal };

// Rotating shallow-water system in solved (time-derivative-isolated) form.
//
//   h_t = -(hu)_x - (hv)_y
//   u_t = -u*u_x - v*u_y + (2*Omega_z - Omega_y*h_y)*v
//         - (g*h - h^2*Omega_y*u)_x + Omega_y*((hu)_x + (hv)_y)
//   v_t = -u*v_x - v*v_y - (2*Omega_z - Omega_y*h_y)*u
//         - (g*h - h^2*Omega_y*u)_y
//
// with Omega_y, Omega_z either symbolic or bound; equator = (Omega_y=Omega,
// Omega_z=0), pole = (Omega_y=0, Omega_z=Omega).
struct PdeSystem {
  SystemLabel label = SystemLabel::general;
  AdvectionReading advection = AdvectionReading::corrected;
  std::vector<char> independent;            // t, x, y
  std::vector<char> dependents;             // h, u, v
  std::map<char, Expr> solved_rhs;          // dep -> RHS of dep_t = ...
  std::map<std::string, Expr> params;       // parameter bindings used to build
};

PdeSystem build_general(const Expr& omega_y, const Expr& omega_z, const Expr& g,
                        AdvectionReading adv = AdvectionReading::corrected);
PdeSystem build_equator(const Expr& omega, const Expr& g,
                        AdvectionReading adv = AdvectionReading::corrected);
PdeSystem build_pole(const Expr& omega, const Expr& g,
                     AdvectionReading adv = AdvectionReading::corrected);

// Human-audit form: the three solved equations, one per line.
std::string system_display(const PdeSystem& sys);

}  // namespace swsym
