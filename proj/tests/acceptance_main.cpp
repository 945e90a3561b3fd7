// Acceptance gate: every criterion prints exactly one [PASS]/[FAIL] line and
// the process exits 0 only if all selected criteria pass.  Run a single
// criterion with --criterion <id> where id is 1..5, 6a, 6b, 7a, 7b, or 8.
//
// Two criteria are expected to fail and are left red on purpose:
//   6a: the transcribed V rate of the scaling-pair reduction has the opposite
//       sign of the derived one, so a literal reproduction check cannot pass.
//   7a: the fixed fourth-order march is exact (one step already lands on the
//       closed form) on the homogeneous-in-t rate, so no convergence order is
//       measurable there; endpoint differences sit at rounding level.
// The findings reports emitted by the library document both.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "swsym/algebra.hpp"
#include "swsym/calculus.hpp"
#include "swsym/lie.hpp"
#include "swsym/model.hpp"
#include "swsym/ode.hpp"
#include "swsym/parse.hpp"
#include "swsym/reduction.hpp"
#include "swsym/vectorfield.hpp"

using namespace swsym;

namespace {

const std::string kFixtures = SWSYM_FIXTURE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Expr P(const std::string& n) { return Expr::parameter(n); }

PdeSystem general_sym() { return build_general(P("Omega_y"), P("Omega_z"), P("g")); }
PdeSystem equator_sym() { return build_equator(P("Omega"), P("g")); }
PdeSystem pole_sym() { return build_pole(P("Omega"), P("g")); }

std::vector<std::string> labels(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --------------------------------------------------------------------------
// 1. Every catalogued generator verifies with exact symbolic zero residuals;
//    the two defective polar entries verify after documented token repairs.

Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  int as_printed = 0, repaired = 0;
  std::string failures;

  auto check_catalog = [&](const std::vector<VectorField>& catalog,
                           const PdeSystem& sys) {
    for (const VectorField& V : catalog) {
      if (is_symmetry(V, sys).ok) {
        ++as_printed;
        continue;
      }
      CorrectionResult cr = search_corrections(V, sys);
      if (cr.found)
        ++repaired;
      else
        failures += (failures.empty() ? "" : ", ") + V.label;
    }
  };
  check_catalog(catalog_general(), general_sym());
  check_catalog(catalog_equator(), equator_sym());
  check_catalog(catalog_pole(P("Omega")), pole_sym());

  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures.empty() && as_printed == 15 && repaired == 2 && secs < 60.0;
  o.detail = std::to_string(as_printed) + " generators verify as printed, " +
             std::to_string(repaired) + " after documented token repairs, in " +
             fmt("%.2f", secs) + " s";
  if (!failures.empty()) o.detail += "; unexplained failures: " + failures;
  return o;
}

// --------------------------------------------------------------------------
// 2. Negative controls: candidate fields outside the catalog are rejected
//    with numeric residuals above 1e-6 at a generic sample point.

Outcome criterion_2() {
  PdeSystem sys = general_sym();
  const std::map<std::string, double> point = {
      {"t", 0.5},          {"x", 1.0},   {"y", -1.0},       {"h", 1.5},
      {"u", 1.0 / 3.0},    {"v", -0.5},  {"h_x", 0.2},      {"h_y", -1.0 / 7.0},
      {"u_x", 2.0 / 7.0},  {"u_y", 0.5}, {"v_x", -1.0 / 3.0}, {"v_y", 3.0 / 7.0},
      {"g", 9.8},          {"Omega_y", 0.5}, {"Omega_z", 4.0 / 3.0}};

  std::vector<VectorField> candidates;
  auto make = [&](const char* label, char slot, bool is_xi, const Expr& value) {
    VectorField V;
    V.label = label;
    if (is_xi)
      V.xi = {{slot, value}};
    else
      V.eta = {{slot, value}};
    candidates.push_back(V);
  };
  make("x d_x", 'x', true, Expr::coordinate('x'));
  make("t d_x", 'x', true, Expr::coordinate('t'));
  make("y d_y", 'y', true, Expr::coordinate('y'));
  make("u d_u", 'u', false, Expr::dependent('u'));
  make("h d_h", 'h', false, Expr::dependent('h'));
  candidates.push_back(
      catalog_equator()[3].with_label("equatorial dilation on the full system"));

  int rejected = 0;
  double smallest_peak = 1e300;
  std::string leaks;
  for (const VectorField& V : candidates) {
    const bool symbolic_ok = is_symmetry(V, sys).ok;
    const double peak = max_residual_numeric(V, sys, {point});
    if (!symbolic_ok && peak > 1e-6) {
      ++rejected;
      smallest_peak = std::min(smallest_peak, peak);
    } else {
      leaks += (leaks.empty() ? "" : ", ") + V.label;
    }
  }

  Outcome o;
  o.pass = rejected >= 5 && leaks.empty();
  o.detail = std::to_string(rejected) + " of " + std::to_string(candidates.size()) +
             " non-symmetry fields rejected; smallest peak residual " +
             fmt("%.3g", smallest_peak);
  if (!leaks.empty()) o.detail += "; not rejected: " + leaks;
  return o;
}

// --------------------------------------------------------------------------
// 3. Commutator reference tables: the abelian and equatorial tables match
//    with zero differences; the polar table gets a complete per-cell verdict
//    report while the computed constants satisfy antisymmetry and Jacobi.

Outcome criterion_3() {
  LieAlgebra gen_alg = structure_constants(labels("X", 3), catalog_general());
  LieAlgebra eq_alg = structure_constants(labels("Y", 5), catalog_equator());
  LieAlgebra pole_alg =
      structure_constants(labels("Z", 9), catalog_pole_corrected(P("Omega")));

  TableReport rg = commutator_compare(
      gen_alg, load_table_fixture(kFixtures + "/tables/commutator_general.json"));
  TableReport re = commutator_compare(
      eq_alg, load_table_fixture(kFixtures + "/tables/commutator_equator.json"));
  TableReport rp = commutator_compare(
      pole_alg, load_table_fixture(kFixtures + "/tables/commutator_pole.json"));

  bool cells_named = true;
  for (const TableCell& c : rp.cells)
    if (c.computed_text.empty()) cells_named = false;

  bool identities = true;
  std::string identity_note;
  try {
    for (const LieAlgebra* a : {&gen_alg, &eq_alg, &pole_alg}) {
      check_antisymmetry(*a);
      check_jacobi(*a);
    }
  } catch (const ExprError& e) {
    identities = false;
    identity_note = e.what();
  }

  Outcome o;
  o.pass = rg.mismatched == 0 && rg.matched == 9 && re.mismatched == 0 &&
           re.matched == 25 && rp.cells.size() == 81 && cells_named && identities;
  o.detail = "abelian and equatorial tables diff-free (9 and 25 cells); polar table: " +
             std::to_string(rp.cells.size()) + " verdicts, " +
             std::to_string(rp.matched) + " match, " + std::to_string(rp.mismatched) +
             " differ; antisymmetry and Jacobi hold identically";
  if (!identities) o.detail += "; identity violation: " + identity_note;
  return o;
}

// --------------------------------------------------------------------------
// 4. Adjoint representation: the abelian and equatorial reference tables
//    match within 1e-10 at eps in {0.1, 0.5, 1.0}; the split polar tables get
//    complete reports on an (eps, Omega) grid and every adjoint map is an
//    algebra automorphism within 1e-9.

double automorphism_gap(const LieAlgebra& alg, double eps, double omega) {
  const int n = alg.dim();
  const std::map<std::string, double> bind = {{"Omega", omega}};
  auto bracket_vec = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (a(i) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (b(j) == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          const Expr& c = alg.structure(i, j, k);
          if (!c.is_zero()) out(k) += a(i) * b(j) * eval_numeric(c, bind);
        }
      }
    }
    return out;
  };
  double worst = 0.0;
  for (int gen = 0; gen < n; ++gen) {
    Eigen::MatrixXd ad = adjoint_numeric(alg, gen, eps, omega);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
        ei(i) = 1.0;
        ej(j) = 1.0;
        worst = std::max(worst, (ad * bracket_vec(ei, ej) -
                                 bracket_vec(ad * ei, ad * ej))
                                    .cwiseAbs()
                                    .maxCoeff());
      }
  }
  return worst;
}

Outcome criterion_4() {
  LieAlgebra gen_alg = structure_constants(labels("X", 3), catalog_general());
  LieAlgebra eq_alg = structure_constants(labels("Y", 5), catalog_equator());
  LieAlgebra pole_alg =
      structure_constants(labels("Z", 9), catalog_pole_corrected(P("Omega")));

  const std::vector<double> eps{0.1, 0.5, 1.0};
  TableReport rg = adjoint_compare(
      gen_alg, load_table_fixture(kFixtures + "/tables/adjoint_general.json"), eps,
      {1.0}, 1e-10);
  TableReport re = adjoint_compare(
      eq_alg, load_table_fixture(kFixtures + "/tables/adjoint_equator.json"), eps,
      {1.0}, 1e-10);

  // spot value: the dilation rescales the first translation by e^eps
  const double spot = adjoint_numeric(eq_alg, 3, 1.0, 1.0)(0, 0);
  const bool spot_ok = std::fabs(spot - std::exp(1.0)) < 1e-10;

  TableReport r1 = adjoint_compare(
      pole_alg, load_table_fixture(kFixtures + "/tables/adjoint_pole_part1.json"),
      {0.1, 0.3}, {0.5, 1.0}, 1e-9);
  TableReport r2 = adjoint_compare(
      pole_alg, load_table_fixture(kFixtures + "/tables/adjoint_pole_part2.json"),
      {0.1, 0.3}, {0.5, 1.0}, 1e-9);

  double gap = 0.0;
  for (const LieAlgebra* a : {&gen_alg, &eq_alg, &pole_alg})
    gap = std::max(gap, automorphism_gap(*a, 0.2, 0.75));

  Outcome o;
  o.pass = rg.mismatched == 0 && re.mismatched == 0 && spot_ok &&
           r1.cells.size() == 45 && r2.cells.size() == 36 && r1.unparseable == 0 &&
           r2.unparseable == 0 && gap < 1e-9;
  o.detail = "abelian and equatorial adjoint tables match within 1e-10 at three eps"
             " values; polar reports cover " +
             std::to_string(r1.cells.size() + r2.cells.size()) +
             " cells on the (eps, Omega) grid; automorphism gap " + fmt("%.2e", gap);
  return o;
}

// --------------------------------------------------------------------------
// 5. The scaling-pair closed forms solve the derived reduced system exactly,
//    and fields rebuilt from them satisfy the equatorial system with
//    second-order finite-difference residuals.

Outcome criterion_5() {
  ReducedOde derived = derive_equator_y2y5(equator_sym());
  const auto [stated, sol] = equator_y2y5();

  bool exact = true;
  for (char S : derived.states)
    if (!closed_form_residual(derived, sol, S).is_zero()) exact = false;

  ClosedFormSampler sampler(
      sol, 't', {{"H0", 1.0}, {"U0", 0.0}, {"V0", 1.0}, {"Omega", 1.0}},
      {1e-6, 1e300});
  PdeSystem sys = equator_sym();
  SimilarityAnsatz ansatz = equator_y2y5_ansatz();
  std::vector<ProbePoint> probes;
  for (double t : {1.0, 2.0})
    for (double y : {0.0, 1.0}) probes.push_back({t, 0.3, y});
  const std::map<std::string, double> params{{"Omega", 1.0}, {"g", 10.0}};

  const std::vector<double> deltas{1e-2, 5e-3, 2.5e-3};
  std::vector<double> maxima;
  for (double d : deltas)
    maxima.push_back(
        reconstruct_residual(sys, ansatz, sampler, d, probes, params).max_residual);
  const double order =
      std::log(maxima.front() / maxima.back()) / std::log(deltas.front() / deltas.back());

  Outcome o;
  o.pass = exact && std::fabs(order - 2.0) <= 0.3;
  o.detail = std::string("closed forms solve the derived system ") +
             (exact ? "exactly" : "INEXACTLY") + "; reconstruction residuals " +
             fmt("%.3e", maxima.front()) + " -> " + fmt("%.3e", maxima.back()) +
             " give order " + fmt("%.3f", order);
  return o;
}

// --------------------------------------------------------------------------
// 6a. Literal reproduction of the transcribed V rate of the scaling-pair
//     reduction.  The derived rate is the negative of the transcription, so
//     this check is expected to stay red; the term-level findings report
//     documents the sign.

Outcome criterion_6a() {
  ReducedOde ode = derive_equator_y4y5(equator_sym());
  ReductionFixture fix =
      load_reduction_fixture(kFixtures + "/reductions/equator_y4y5.json");
  std::vector<ReductionFinding> findings = compare_equator_y4y5(ode, fix);

  const Expr claimed = parse_expr("V*(U - w)^-1");
  const bool literal = ode.rhs.at('V') == claimed;

  Outcome o;
  o.pass = literal && findings.size() == 4;
  o.detail = "term-level comparison emitted for " + std::to_string(findings.size()) +
             " reference forms";
  if (!literal)
    o.detail += "; derived V rate is " + to_string(ode.rhs.at('V')) +
                ", the negative of the transcribed V/(U - w)";
  return o;
}

// --------------------------------------------------------------------------
// 6b. Travelling-wave trajectories, pushed back through the similarity map,
//     satisfy the full system with residual <= C*(delta^2 + 1e-8), C = 1,
//     at the catalogued rotation/gravity values.

Outcome criterion_6b() {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  const FigureRun& r = runs.at("wave_1");
  ReducedOde tw = derive_travelling_wave(general_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  opt.max_step = 0.005;
  Trajectory traj = integrate_adaptive(tw, r.params, r.initial, r.start, r.end, opt);
  TrajectorySampler sampler(traj);

  PdeSystem sys = general_sym();
  SimilarityAnsatz ansatz = travelling_wave_ansatz();
  const std::vector<ProbePoint> probes{
      {0.1, 0.5, 0.2}, {0.05, 1.0, 0.6}, {0.2, 2.0, 0.7}, {0.0, 0.2, 0.0}};

  const double C = 1.0;
  bool bounded = true;
  std::string residuals;
  for (double d : {1e-2, 5e-3, 2.5e-3}) {
    const double m =
        reconstruct_residual(sys, ansatz, sampler, d, probes, r.params).max_residual;
    if (m > C * (d * d + 1e-8)) bounded = false;
    residuals += (residuals.empty() ? "" : ", ") + fmt("%.3e", m);
  }

  Outcome o;
  o.pass = bounded;
  o.detail = "max residuals " + residuals +
             " at half-widths 1e-2, 5e-3, 2.5e-3, all within 1.0*(delta^2 + 1e-8)";
  return o;
}

// --------------------------------------------------------------------------
// 7a. Fourth-order convergence measured on the homogeneous-in-t rate.  A
//     single fourth-order step is already exact there, so the measured slope
//     is rounding noise; expected to stay red.

Outcome criterion_7a() {
  ReducedOde ode = derive_equator_y2y5(equator_sym());
  ConvergenceReport rep = convergence_order(ode, {{"Omega", 1.0}}, {1.0, 0.0, 1.0},
                                            1.0, 2.0, {0.1, 0.05, 0.025, 0.0125});
  double emax = 0.0;
  for (double e : rep.errors) emax = std::max(emax, e);

  Outcome o;
  o.pass = std::fabs(rep.order - 4.0) <= 0.2;
  o.detail = "measured slope " + fmt("%.3f", rep.order) + " with endpoint errors <= " +
             fmt("%.2e", emax);
  if (!o.pass)
    o.detail += "; the march is exact on this rate (one step maps the state by"
                " t/(t+h) exactly), leaving only rounding noise to fit";
  return o;
}

// --------------------------------------------------------------------------
// 7b. The scaling-pair integration stops on a detected U - w = 0 crossing
//     with the refined event point within 1e-10 of the locus.

Outcome criterion_7b() {
  ReducedOde ode = derive_equator_y4y5(equator_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  Trajectory t = integrate_adaptive(ode, {{"Omega", 1.0}, {"g", 10.0}},
                                    {1.0, 2.0, 0.0}, 0.0, 10.0, opt);

  Outcome o;
  if (!t.truncated || t.events.size() != 1) {
    o.detail = "integration did not stop on a single event";
    return o;
  }
  const Event& e = t.events.front();
  const double gap = std::fabs(e.state[1] - e.location);
  o.pass = e.kind == EventKind::locus_crossing && e.locus_id == "pivot_V" &&
           gap < 1e-10;
  o.detail = "stopped at w = " + fmt("%.8f", e.location) + " on locus '" + e.locus_id +
             "' with |U - w| = " + fmt("%.2e", gap);
  return o;
}

// --------------------------------------------------------------------------
// 8. Algebra properties: closure under the commutator and identically zero
//    Jacobi residuals for all three catalogs.

Outcome criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    LieAlgebra gen_alg = structure_constants(labels("X", 3), catalog_general());
    LieAlgebra eq_alg = structure_constants(labels("Y", 5), catalog_equator());
    LieAlgebra pole_alg =
        structure_constants(labels("Z", 9), catalog_pole_corrected(P("Omega")));
    for (const LieAlgebra* a : {&gen_alg, &eq_alg, &pole_alg}) {
      check_antisymmetry(*a);
      check_jacobi(*a);
    }
  } catch (const ExprError& e) {
    o.detail = std::string("property violation: ") + e.what();
    return o;
  }
  const double secs = seconds_since(t0);
  o.pass = secs < 300.0;
  o.detail = "closure and Jacobi hold identically for the 3-, 5-, and 9-generator"
             " catalogs in " +
             fmt("%.2f", secs) + " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion 1|2|3|4|5|6a|6b|7a|7b|8]\n",
                   argv[0]);
      return 64;
    }
  }

  struct Entry {
    const char* id;
    const char* title;
    Outcome (*run)();
  };
  const std::vector<Entry> entries = {
      {"1", "symmetry verification", criterion_1},
      {"2", "negative controls", criterion_2},
      {"3", "commutator tables", criterion_3},
      {"4", "adjoint representation", criterion_4},
      {"5", "exact solution", criterion_5},
      {"6a", "reduction fidelity, transcribed V rate", criterion_6a},
      {"6b", "reduction fidelity, reconstructed wave residual", criterion_6b},
      {"7a", "integrator convergence rate", criterion_7a},
      {"7b", "integrator event termination", criterion_7b},
      {"8", "algebra properties", criterion_8},
  };

  bool matched = false, all_pass = true;
  for (const Entry& e : entries) {
    if (!only.empty() && only != e.id) continue;
    matched = true;
    const Outcome o = e.run();
    std::printf("[%s] criterion %s: %s — %s\n", o.pass ? "PASS" : "FAIL", e.id,
                e.title, o.detail.c_str());
    all_pass = all_pass && o.pass;
  }
  if (!matched) {
    std::fprintf(stderr, "unknown criterion id '%s'\n", only.c_str());
    return 64;
  }
  return all_pass ? 0 : 1;
}
