#include "swsym/model.hpp"

#include <sstream>

#include "swsym/calculus.hpp"

namespace swsym {

const char* system_name(SystemLabel s) {
  switch (s) {
    case SystemLabel::general: return "general";
    case SystemLabel::equator: return "equator";
    case SystemLabel::pole: return "pole";
  }
  return "?";
}

PdeSystem build_general(const Expr& omega_y, const Expr& omega_z, const Expr& g,
                        AdvectionReading adv) {
  PdeSystem sys;
  sys.label = SystemLabel::general;
  sys.advection = adv;
  sys.independent = {'t', 'x', 'y'};
  sys.dependents = {'h', 'u', 'v'};
  sys.params = {{"Omega_y", omega_y}, {"Omega_z", omega_z}, {"g", g}};

  Expr h = Expr::dependent('h');
  Expr u = Expr::dependent('u');
  Expr v = Expr::dependent('v');
  Expr hx = Expr::jet('h', "x");
  Expr hy = Expr::jet('h', "y");
  Expr ux = Expr::jet('u', "x");
  Expr uy = Expr::jet('u', "y");
  Expr vx = Expr::jet('v', "x");
  Expr vy = Expr::jet('v', "y");

  Expr div_flux = total_derivative(h * u, 'x') + total_derivative(h * v, 'y');
  Expr momentum_potential = g * h - h.pow(2) * omega_y * u;
  Expr coriolis = 2 * omega_z - omega_y * hy;
  Expr v_advection_of_u = (adv == AdvectionReading::corrected) ? v * uy : v * ux;

  sys.solved_rhs['h'] = -div_flux;
  sys.solved_rhs['u'] = -u * ux - v_advection_of_u + coriolis * v -
                        total_derivative(momentum_potential, 'x') + omega_y * div_flux;
  sys.solved_rhs['v'] =
      -u * vx - v * vy - coriolis * u - total_derivative(momentum_potential, 'y');
  return sys;
}

PdeSystem build_equator(const Expr& omega, const Expr& g, AdvectionReading adv) {
  PdeSystem sys = build_general(omega, Expr(0L), g, adv);
  sys.label = SystemLabel::equator;
  sys.params = {{"Omega", omega}, {"g", g}};
  return sys;
}

PdeSystem build_pole(const Expr& omega, const Expr& g, AdvectionReading adv) {
  PdeSystem sys = build_general(Expr(0L), omega, g, adv);
  sys.label = SystemLabel::pole;
  sys.params = {{"Omega", omega}, {"g", g}};
  return sys;
}

std::string system_display(const PdeSystem& sys) {
  std::ostringstream os;
  for (char dep : sys.dependents)
    os << dep << "_t = " << sys.solved_rhs.at(dep).str() << "\n";
  return os.str();
}

}  // namespace swsym
