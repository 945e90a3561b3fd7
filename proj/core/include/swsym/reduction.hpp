#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swsym/expr.hpp"
#include "swsym/model.hpp"
#include "swsym/vectorfield.hpp"

namespace swsym {

struct ReductionError : ExprError {
  using ExprError::ExprError;
};

struct RangeError : ExprError {
  using ExprError::ExprError;
};

// Group-invariant substitution h = F_h(H,U,V,t,x,y), u = ..., v = ... with a
// single similarity variable.  `w_expr` is that variable as a function of the
// base coordinates (for reductions onto t it is just t itself).  `eliminate`
// removes any base coordinate that survives the pullback (e.g. x -> w - y + c*t
// for the travelling wave), and `clear_factor` multiplies the pulled-back
// equations to clear coordinate denominators (e.g. t for the 1/t reductions).
struct SimilarityAnsatz {
  std::string name;
  char independent = 'w';           // similarity variable: 'w' or 't'
  Expr w_expr;                      // similarity variable in terms of t, x, y
  std::map<char, Expr> fields;      // dependent -> invariant form
  std::map<std::string, Expr> eliminate;
  Expr clear_factor = Expr(1L);
};

SimilarityAnsatz travelling_wave_ansatz(const Expr& speed = Expr(2L));
SimilarityAnsatz equator_y2y5_ansatz();
SimilarityAnsatz equator_y4y5_ansatz();

// Reduced ODE system dS/d(independent) = rhs[S] for S in {H, U, V}.
// `equations` keeps the cleared linear-in-derivatives forms in source equation
// order (mass, u-momentum, v-momentum) for display and audit.  `rhs_num` and
// `rhs_den` expose the structured solve (Cramer numerator over determinant, or
// single-derivative pivot), and `singular_loci` the denominators whose zero
// sets bound the domain: the joint determinant under id "determinant", each
// pivot under "pivot_<state>".
struct ReducedOde {
  std::string name;
  char independent = 'w';
  std::vector<char> states;                              // H, U, V
  std::vector<Expr> equations;
  std::map<char, Expr> rhs;
  std::map<char, Expr> rhs_num;
  std::map<char, Expr> rhs_den;
  std::vector<std::pair<std::string, Expr>> singular_loci;
};

ReducedOde derive_reduction(const PdeSystem& sys, const SimilarityAnsatz& ansatz);
ReducedOde derive_travelling_wave(const PdeSystem& sys, const Expr& speed = Expr(2L));
ReducedOde derive_equator_y2y5(const PdeSystem& sys);
ReducedOde derive_equator_y4y5(const PdeSystem& sys);

// Exact solution of a reduced system, one expression per state in the
// similarity variable and integration constants (H0, U0, V0).
struct ClosedFormSolution {
  std::map<char, Expr> states;
};

// The displayed reduction by the pair {Y2, Y5}: the three cleared equations
// t*H_t + H = 0, t*U_t - Omega*H = 0, t*V_t + V = 0 and their closed forms.
std::pair<ReducedOde, ClosedFormSolution> equator_y2y5();

// d(sol)/d(independent) - rhs with the solution substituted; zero iff exact.
Expr closed_form_residual(const ReducedOde& ode, const ClosedFormSolution& sol,
                          char state);

// Residual of the invariant-surface condition xi.grad(field) - eta for one
// dependent; identically zero when the ansatz is invariant under `gen`.
Expr invariant_surface_residual(const SimilarityAnsatz& ansatz,
                                const VectorField& gen, char dep);

// ---------------------------------------------------------------------------
// Reference-form fixtures and comparison findings

struct ReductionFixture {
  std::string name;
  char independent = 'w';
  std::vector<std::pair<std::string, std::string>> entries;  // id -> text
  std::map<std::string, std::string> display;                // id -> as printed
  std::vector<std::string> notes;
};

ReductionFixture load_reduction_fixture(const std::string& path);

struct ReductionFinding {
  std::string id;
  bool match = false;
  std::string detail;
};

// Travelling wave: checks each transcribed relation against the derived
// system with the scale factor read as the negated determinant, then checks
// the transcribed G itself against that determinant.
std::vector<ReductionFinding> compare_travelling_wave(const ReducedOde& ode,
                                                      const ReductionFixture& fix);

// Pair {Y2, Y5}: cleared equations must match the transcription exactly;
// transcribed closed forms must have zero residual.
std::vector<ReductionFinding> compare_equator_y2y5(const ReducedOde& ode,
                                                   const ReductionFixture& fix);

// Pair {Y4, Y5}: derived right sides and determinant against the
// transcription (with the L placeholder expanded).
std::vector<ReductionFinding> compare_equator_y4y5(const ReducedOde& ode,
                                                   const ReductionFixture& fix);

std::string findings_text(const std::vector<ReductionFinding>& findings);

// ---------------------------------------------------------------------------
// Field reconstruction and finite-difference residuals

// Profile of the reduced states over the similarity variable.  Implemented by
// closed forms here and by integrated trajectories in the ODE layer.
class StateSampler {
 public:
  virtual ~StateSampler() = default;
  virtual std::array<double, 3> operator()(double s) const = 0;  // H, U, V
  virtual std::pair<double, double> domain() const = 0;
};

class ClosedFormSampler : public StateSampler {
 public:
  ClosedFormSampler(const ClosedFormSolution& sol, char independent,
                    std::map<std::string, double> bindings,
                    std::pair<double, double> domain = {-1e300, 1e300});
  std::array<double, 3> operator()(double s) const override;
  std::pair<double, double> domain() const override;

 private:
  std::map<char, Expr> states_;
  char independent_;
  std::map<std::string, double> bindings_;
  std::pair<double, double> domain_;
};

struct ProbePoint {
  double t = 0, x = 0, y = 0;
};

struct ResidualReport {
  double max_residual = 0;
  double rms = 0;
  int probes_used = 0;
  std::array<double, 3> per_equation_max{0, 0, 0};
  std::vector<std::string> excluded;  // probes skipped near a singular locus
};

// Rebuilds h, u, v from the ansatz and sampled states, then evaluates the
// governing equations with second-order central differences of half-width
// `delta` at each probe.  Probes whose stencil leaves the sampler domain
// raise RangeError; probes within `locus_tol` of a singular locus are
// excluded with a note.
ResidualReport reconstruct_residual(
    const PdeSystem& sys, const SimilarityAnsatz& ansatz,
    const StateSampler& sampler, double delta,
    const std::vector<ProbePoint>& probes,
    const std::map<std::string, double>& params,
    const std::vector<std::pair<std::string, Expr>>& loci = {},
    double locus_tol = 1e-6);

}  // namespace swsym
