// Command-line driver: verification, table generation, reduction listing,
// integration, and residual validation with machine-readable JSON output.
//
// Exit codes: 0 success; 2 a catalogued generator fails verification with no
// documented correction; 64 usage error; 66 missing or malformed reference
// table; 1 any other runtime failure.

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "swsym/algebra.hpp"
#include "swsym/calculus.hpp"
#include "swsym/lie.hpp"
#include "swsym/model.hpp"
#include "swsym/ode.hpp"
#include "swsym/parse.hpp"
#include "swsym/reduction.hpp"
#include "swsym/report.hpp"
#include "swsym/vectorfield.hpp"

#ifndef SWSYM_DEFAULT_FIXTURE_DIR
#define SWSYM_DEFAULT_FIXTURE_DIR "share/swsym/fixtures"
#endif

namespace {

using namespace swsym;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "symbolic" keeps the named parameter free; anything else must parse as an
// exact expression (integers and ratios like 1/2; decimals are rejected).
Expr bind_param(const std::string& text, const std::string& symbol) {
  if (text == "symbolic") return Expr::parameter(symbol);
  try {
    return parse_expr(text);
  } catch (const ExprError& e) {
    throw UsageError("cannot read value '" + text + "' for " + symbol + ": " + e.what());
  }
}

PdeSystem make_system(const std::string& system, const std::string& omega,
                      const std::string& g, AdvectionReading adv) {
  const Expr gg = bind_param(g, "g");
  if (system == "general")
    return build_general(bind_param(omega, "Omega_y"), bind_param(omega, "Omega_z"), gg,
                         adv);
  if (system == "equator") return build_equator(bind_param(omega, "Omega"), gg, adv);
  if (system == "pole") return build_pole(bind_param(omega, "Omega"), gg, adv);
  throw UsageError("unknown system selector '" + system + "'");
}

std::vector<VectorField> make_catalog(const std::string& system,
                                      const std::string& omega) {
  if (system == "general") return catalog_general();
  if (system == "equator") return catalog_equator();
  if (system == "pole") return catalog_pole(bind_param(omega, "Omega"));
  throw UsageError("unknown system selector '" + system + "'");
}

void emit(const JsonValue& root, const std::string& out) {
  const std::string text = root.render() + "\n";
  std::fputs(text.c_str(), stdout);
  if (!out.empty()) write_text_file(out, text);
}

std::vector<std::string> label_range(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const std::string& system, const std::string& omega,
               const std::string& g, const std::string& advection,
               const std::string& out) {
  const AdvectionReading adv = advection == "literal" ? AdvectionReading::literal
                                                      : AdvectionReading::corrected;
  PdeSystem sys = make_system(system, omega, g, adv);
  std::vector<VectorField> catalog = make_catalog(system, omega);

  JsonValue gens = JsonValue::array();
  bool all_ok = true;
  int corrections = 0;
  for (const VectorField& V : catalog) {
    JsonValue gj = JsonValue::object();
    gj.set("generator", JsonValue::string(V.label));
    gj.set("field", JsonValue::string(vf_display(V)));
    SymmetryVerdict verdict = is_symmetry(V, sys);
    gj.set("verifies_as_printed", JsonValue::boolean(verdict.ok));
    if (!verdict.ok) {
      JsonValue res = JsonValue::array();
      for (const Expr& r : verdict.residuals) res.push(JsonValue::string(to_string(r)));
      gj.set("residuals", std::move(res));
      CorrectionResult cr = search_corrections(V, sys);
      gj.set("corrected", JsonValue::boolean(cr.found));
      if (cr.found) {
        ++corrections;
        JsonValue moves = JsonValue::array();
        for (const std::string& m : cr.moves) moves.push(JsonValue::string(m));
        gj.set("correction_moves", std::move(moves));
        gj.set("corrected_field", JsonValue::string(vf_display(cr.corrected)));
      } else {
        all_ok = false;
      }
    }
    gens.push(std::move(gj));
  }

  JsonValue root = JsonValue::object();
  root.set("command", JsonValue::string("verify"));
  root.set("system", JsonValue::string(system));
  root.set("advection", JsonValue::string(advection));
  JsonValue params = JsonValue::object();
  params.set("Omega", JsonValue::string(omega));
  params.set("g", JsonValue::string(g));
  root.set("parameters", std::move(params));
  root.set("generators", std::move(gens));
  root.set("corrections_applied", JsonValue::integer(corrections));
  root.set("all_verified", JsonValue::boolean(all_ok));
  emit(root, out);
  return all_ok ? 0 : 2;
}

// ---------------------------------------------------------------------------
// tables

JsonValue report_json(const std::string& fixture, const TableReport& rep) {
  JsonValue j = JsonValue::object();
  j.set("fixture", JsonValue::string(fixture));
  j.set("title", JsonValue::string(rep.title));
  j.set("matched", JsonValue::integer(rep.matched));
  j.set("mismatched", JsonValue::integer(rep.mismatched));
  j.set("unparseable", JsonValue::integer(rep.unparseable));
  JsonValue cells = JsonValue::array();
  for (const TableCell& c : rep.cells) {
    JsonValue cj = JsonValue::object();
    cj.set("row", JsonValue::string(c.row));
    cj.set("col", JsonValue::string(c.col));
    cj.set("table", JsonValue::string(c.table_text));
    cj.set("computed", JsonValue::string(c.computed_text));
    cj.set("match", JsonValue::boolean(c.match));
    if (!c.detail.empty()) cj.set("detail", JsonValue::string(c.detail));
    cells.push(std::move(cj));
  }
  j.set("cells", std::move(cells));
  return j;
}

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
        Eigen::VectorXd lhs = ad * bracket_vec(ei, ej);
        Eigen::VectorXd rhs = bracket_vec(ad * ei, ad * ej);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
  }
  return worst;
}

int run_tables(const std::string& fixtures, const std::string& outdir, double tol) {
  LieAlgebra gen_alg = structure_constants(label_range("X", 3), catalog_general());
  LieAlgebra eq_alg = structure_constants(label_range("Y", 5), catalog_equator());
  LieAlgebra pole_alg = structure_constants(
      label_range("Z", 9), catalog_pole_corrected(Expr::parameter("Omega")));
  for (const LieAlgebra* a : {&gen_alg, &eq_alg, &pole_alg}) {
    check_antisymmetry(*a);
    check_jacobi(*a);
  }

  struct Job {
    const char* fixture;
    const LieAlgebra* alg;
    bool adjoint;
    std::vector<double> eps;
    std::vector<double> omegas;
    double tol;
  };
  const std::vector<Job> jobs = {
      {"commutator_general", &gen_alg, false, {}, {}, 0},
      {"commutator_equator", &eq_alg, false, {}, {}, 0},
      {"commutator_pole", &pole_alg, false, {}, {}, 0},
      {"adjoint_general", &gen_alg, true, {0.1, 0.5, 1.0}, {1.0}, 1e-10},
      {"adjoint_equator", &eq_alg, true, {0.1, 0.5, 1.0}, {1.0}, 1e-10},
      {"adjoint_pole_part1", &pole_alg, true, {0.1, 0.3}, {0.5, 1.0}, tol},
      {"adjoint_pole_part2", &pole_alg, true, {0.1, 0.3}, {0.5, 1.0}, tol},
  };

  JsonValue reports = JsonValue::array();
  int total_mismatched = 0;
  for (const Job& job : jobs) {
    const std::string path = fixtures + "/tables/" + job.fixture + ".json";
    FixtureTable fix = load_table_fixture(path);
    TableReport rep = job.adjoint
                          ? adjoint_compare(*job.alg, fix, job.eps, job.omegas, job.tol)
                          : commutator_compare(*job.alg, fix);
    total_mismatched += rep.mismatched;
    reports.push(report_json(job.fixture, rep));
    if (!outdir.empty())
      write_text_file(outdir + "/" + job.fixture + ".txt", table_report_text(rep));
  }

  JsonValue autom = JsonValue::object();
  autom.set("eps", JsonValue::number(0.2));
  autom.set("Omega", JsonValue::number(0.75));
  autom.set("general", JsonValue::number(automorphism_gap(gen_alg, 0.2, 0.75)));
  autom.set("equator", JsonValue::number(automorphism_gap(eq_alg, 0.2, 0.75)));
  autom.set("pole", JsonValue::number(automorphism_gap(pole_alg, 0.2, 0.75)));

  JsonValue root = JsonValue::object();
  root.set("command", JsonValue::string("tables"));
  root.set("fixtures", JsonValue::string(fixtures));
  root.set("antisymmetry", JsonValue::string("verified"));
  root.set("jacobi", JsonValue::string("verified"));
  root.set("automorphism_gap", std::move(autom));
  root.set("mismatched_total", JsonValue::integer(total_mismatched));
  root.set("reports", std::move(reports));
  emit(root, outdir.empty() ? std::string() : outdir + "/tables_report.json");
  return 0;
}

// ---------------------------------------------------------------------------
// reduce

int run_reduce(const std::string& reduction, const std::string& system,
               const std::string& speed, const std::string& fixtures,
               const std::string& out) {
  std::string sys_name = system;
  if (sys_name.empty()) sys_name = reduction == "travelling_wave" ? "general" : "equator";
  if (reduction != "travelling_wave" && sys_name != "equator")
    throw UsageError("reduction '" + reduction + "' targets the equatorial system");
  PdeSystem sys = make_system(sys_name, "symbolic", "symbolic",
                              AdvectionReading::corrected);

  ReducedOde ode;
  if (reduction == "travelling_wave")
    ode = derive_travelling_wave(sys, bind_param(speed, "c"));
  else if (reduction == "equator_y2y5")
    ode = derive_equator_y2y5(sys);
  else
    ode = derive_equator_y4y5(sys);

  JsonValue root = JsonValue::object();
  root.set("command", JsonValue::string("reduce"));
  root.set("reduction", JsonValue::string(reduction));
  root.set("system", JsonValue::string(sys_name));
  root.set("independent", JsonValue::string(std::string(1, ode.independent)));

  JsonValue eqs = JsonValue::array();
  for (const Expr& e : ode.equations) eqs.push(JsonValue::string(to_string(e) + " = 0"));
  root.set("equations", std::move(eqs));

  JsonValue rhs = JsonValue::object();
  for (char S : ode.states) {
    JsonValue sj = JsonValue::object();
    sj.set("rate", JsonValue::string(to_string(ode.rhs.at(S))));
    sj.set("numerator", JsonValue::string(to_string(ode.rhs_num.at(S))));
    sj.set("denominator", JsonValue::string(to_string(ode.rhs_den.at(S))));
    rhs.set(std::string(1, S), std::move(sj));
  }
  root.set("rates", std::move(rhs));

  JsonValue loci = JsonValue::array();
  for (const auto& [id, ex] : ode.singular_loci) {
    JsonValue lj = JsonValue::object();
    lj.set("id", JsonValue::string(id));
    lj.set("expression", JsonValue::string(to_string(ex)));
    loci.push(std::move(lj));
  }
  root.set("singular_loci", std::move(loci));

  if (reduction == "equator_y2y5") {
    const auto [stated, sol] = equator_y2y5();
    JsonValue cf = JsonValue::object();
    for (char S : stated.states) {
      JsonValue sj = JsonValue::object();
      sj.set("state", JsonValue::string(to_string(sol.states.at(S))));
      sj.set("residual", JsonValue::string(to_string(closed_form_residual(ode, sol, S))));
      cf.set(std::string(1, S), std::move(sj));
    }
    root.set("closed_forms", std::move(cf));
  }

  ReductionFixture fix =
      load_reduction_fixture(fixtures + "/reductions/" + reduction + ".json");
  std::vector<ReductionFinding> findings;
  if (reduction == "travelling_wave")
    findings = compare_travelling_wave(ode, fix);
  else if (reduction == "equator_y2y5")
    findings = compare_equator_y2y5(ode, fix);
  else
    findings = compare_equator_y4y5(ode, fix);

  int matched = 0;
  JsonValue fj = JsonValue::array();
  for (const ReductionFinding& f : findings) {
    if (f.match) ++matched;
    JsonValue one = JsonValue::object();
    one.set("id", JsonValue::string(f.id));
    one.set("match", JsonValue::boolean(f.match));
    one.set("detail", JsonValue::string(f.detail));
    fj.push(std::move(one));
  }
  root.set("findings", std::move(fj));
  root.set("findings_summary",
           JsonValue::string(std::to_string(matched) + " of " +
                             std::to_string(findings.size()) + " reference forms match"));
  emit(root, out);
  return 0;
}

// ---------------------------------------------------------------------------
// integrate + residual helpers

ReducedOde make_reduced(const std::string& reduction, const std::string& system) {
  PdeSystem sys =
      make_system(system, "symbolic", "symbolic", AdvectionReading::corrected);
  if (reduction == "travelling_wave") return derive_travelling_wave(sys);
  if (reduction == "equator_y2y5") return derive_equator_y2y5(sys);
  if (reduction == "equator_y4y5") return derive_equator_y4y5(sys);
  throw UsageError("unknown reduction '" + reduction + "'");
}

SimilarityAnsatz make_ansatz(const std::string& reduction) {
  if (reduction == "travelling_wave") return travelling_wave_ansatz();
  if (reduction == "equator_y2y5") return equator_y2y5_ansatz();
  if (reduction == "equator_y4y5") return equator_y4y5_ansatz();
  throw UsageError("unknown reduction '" + reduction + "'");
}

std::map<std::string, double> numeric_params(const std::string& reduction,
                                             double omega, double g) {
  if (reduction == "travelling_wave")
    return {{"Omega_y", omega}, {"Omega_z", omega}, {"g", g}};
  return {{"Omega", omega}, {"g", g}};
}

std::array<double, 3> parse_initial(const std::string& text) {
  std::array<double, 3> out{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      out[i] = std::stod(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw UsageError("cannot read initial state '" + text + "'");
    }
    pos += used;
    if (i < 2) {
      if (pos >= text.size() || text[pos] != ',')
        throw UsageError("initial state must be three comma-separated numbers");
      ++pos;
    }
  }
  if (pos != text.size())
    throw UsageError("initial state must be three comma-separated numbers");
  return out;
}

int run_integrate(const std::string& runid, const std::string& fixtures,
                  std::string reduction, std::string system,
                  const std::string& initial, double start, double end,
                  bool range_given, const std::string& method, double step,
                  double tol, double max_step, double omega, double g,
                  const std::string& out) {
  std::map<std::string, double> params;
  std::array<double, 3> init{};
  if (!runid.empty()) {
    FigureRunSet runs = load_figure_runs(fixtures + "/figure_runs.json");
    const FigureRun& r = runs.at(runid);
    reduction = r.reduction;
    system = r.system;
    params = r.params;
    init = r.initial;
    start = r.start;
    end = r.end;
  } else {
    if (reduction.empty() || initial.empty() || !range_given)
      throw UsageError(
          "either --run or the full --reduction/--initial/--start/--end set is required");
    if (system.empty())
      system = reduction == "travelling_wave" ? "general" : "equator";
    params = numeric_params(reduction, omega, g);
    init = parse_initial(initial);
  }

  ReducedOde ode = make_reduced(reduction, system);
  Trajectory traj;
  if (method == "dp45") {
    AdaptiveOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    opt.max_step = max_step;
    traj = integrate_adaptive(ode, params, init, start, end, opt);
  } else {
    FixedOptions opt;
    opt.method = method == "euler" ? Method::euler : Method::rk4;
    traj = integrate_fixed(ode, params, init, start, end, step, opt);
  }

  const std::string prefix = out.empty() ? "trajectory" : out;
  write_trajectory_csv(traj, prefix + ".csv");
  write_events_json(traj, prefix + ".events.json");
  std::fputs((events_json_text(traj)).c_str(), stdout);
  return 0;
}

int run_residual(const std::string& runid, bool closed_form,
                 const std::string& fixtures, std::vector<double> deltas,
                 double omega, double g, const std::string& out) {
  if (deltas.empty()) deltas = {1e-2, 5e-3, 2.5e-3};

  PdeSystem sys;
  SimilarityAnsatz ansatz;
  std::map<std::string, double> params;
  std::vector<ProbePoint> probes;
  std::vector<std::pair<std::string, Expr>> loci;
  std::unique_ptr<StateSampler> sampler;
  Trajectory traj;  // keeps the trajectory alive for its sampler
  std::string source;

  if (closed_form) {
    source = "closed_form";
    sys = build_equator(Expr::parameter("Omega"), Expr::parameter("g"));
    ansatz = equator_y2y5_ansatz();
    params = {{"Omega", omega}, {"g", g}};
    const auto [stated, sol] = equator_y2y5();
    sampler = std::make_unique<ClosedFormSampler>(
        sol, 't',
        std::map<std::string, double>{
            {"H0", 1.0}, {"U0", 0.0}, {"V0", 1.0}, {"Omega", omega}},
        std::pair<double, double>{1e-6, 1e300});
    for (double t : {1.0, 2.0})
      for (double y : {0.0, 1.0}) probes.push_back({t, 0.3, y});
  } else {
    if (runid.empty()) throw UsageError("either --run or --closed-form is required");
    source = runid;
    FigureRunSet runs = load_figure_runs(fixtures + "/figure_runs.json");
    const FigureRun& r = runs.at(runid);
    sys = make_system(r.system, "symbolic", "symbolic", AdvectionReading::corrected);
    ansatz = make_ansatz(r.reduction);
    params = r.params;
    ReducedOde ode = make_reduced(r.reduction, r.system);
    loci = ode.singular_loci;
    AdaptiveOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    opt.max_step = 0.005;
    traj = integrate_adaptive(ode, r.params, r.initial, r.start, r.end, opt);
    sampler = std::make_unique<TrajectorySampler>(traj);
    // probes at 20/40/60/80 percent of the realized similarity interval
    const auto [lo, hi] = sampler->domain();
    for (double f : {0.2, 0.4, 0.6, 0.8}) {
      const double w = lo + f * (hi - lo);
      if (r.reduction == "travelling_wave")
        probes.push_back({0.1, w + 0.2 - 0.3, 0.3});  // w = x + y - 2t
      else if (r.reduction == "equator_y4y5")
        probes.push_back({1.0, w, 0.5});  // w = x / t
      else
        probes.push_back({w, 0.3, 0.7});  // w = t
    }
  }

  JsonValue reports = JsonValue::array();
  std::vector<double> maxima;
  for (double d : deltas) {
    ResidualReport rep = reconstruct_residual(sys, ansatz, *sampler, d, probes, params,
                                              loci, 1e-6);
    maxima.push_back(rep.max_residual);
    JsonValue rj = JsonValue::object();
    rj.set("delta", JsonValue::number(d));
    rj.set("max_residual", JsonValue::number(rep.max_residual));
    rj.set("rms", JsonValue::number(rep.rms));
    rj.set("probes_used", JsonValue::integer(rep.probes_used));
    JsonValue ex = JsonValue::array();
    for (const std::string& note : rep.excluded) ex.push(JsonValue::string(note));
    rj.set("excluded", std::move(ex));
    reports.push(std::move(rj));
  }

  JsonValue root = JsonValue::object();
  root.set("command", JsonValue::string("residual"));
  root.set("source", JsonValue::string(source));
  root.set("reports", std::move(reports));
  if (deltas.size() >= 2 && maxima.back() > 0) {
    const double ratio = maxima.front() / maxima.back();
    root.set("decay_ratio", JsonValue::number(ratio));
    root.set("order_estimate",
             JsonValue::number(std::log(ratio) /
                               std::log(deltas.front() / deltas.back())));
  }
  emit(root, out);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"Symmetry toolkit for the rotating shallow-water system"};
  app.require_subcommand(1);

  std::string system = "general", omega = "symbolic", g = "symbolic";
  std::string advection = "corrected";
  std::string fixtures = SWSYM_DEFAULT_FIXTURE_DIR;
  std::string out, reduction, speed = "2", runid, initial, method = "dp45";
  double start = 0, end = 0, step = 1e-3, tol = 1e-8, max_step = 0;
  double omega_num = 1.0, g_num = 10.0;
  std::vector<double> deltas;
  bool closed_form = false;
  bool range_given = false;

  CLI::App* verify = app.add_subcommand(
      "verify", "Check every catalogued generator against the chosen system");
  verify->add_option("--system", system, "general | equator | pole")
      ->check(CLI::IsMember({"general", "equator", "pole"}));
  verify->add_option("--omega", omega, "rotation rate: 'symbolic' or an exact value");
  verify->add_option("--g", g, "gravity: 'symbolic' or an exact value");
  verify->add_option("--advection", advection, "v-advection reading in the u-momentum equation")
      ->check(CLI::IsMember({"corrected", "literal"}));
  verify->add_option("--out", out, "also write the JSON report here");

  CLI::App* tables = app.add_subcommand(
      "tables", "Compare derived commutator and adjoint tables with the reference tables");
  tables->add_option("--fixtures", fixtures, "reference-table directory");
  tables->add_option("--out", out, "directory for per-table text reports and JSON");
  tables->add_option("--tol", tol, "numeric tolerance for the split adjoint tables")
      ->check(CLI::PositiveNumber);

  CLI::App* reduce = app.add_subcommand(
      "reduce", "Derive a similarity reduction and compare it with the reference forms");
  reduce->add_option("--reduction", reduction, "travelling_wave | equator_y2y5 | equator_y4y5")
      ->required()
      ->check(CLI::IsMember({"travelling_wave", "equator_y2y5", "equator_y4y5"}));
  reduce->add_option("--system", system, "overrides the reduction's default system")
      ->check(CLI::IsMember({"general", "equator", "pole"}))
      ->default_str("");
  reduce->add_option("--speed", speed, "travelling-wave speed (exact value)");
  reduce->add_option("--fixtures", fixtures, "reference-table directory");
  reduce->add_option("--out", out, "also write the JSON report here");

  CLI::App* integrate = app.add_subcommand(
      "integrate", "Integrate a reduced system and emit trajectory CSV plus event JSON");
  integrate->add_option("--run", runid, "catalogued run id from the run table");
  integrate->add_option("--fixtures", fixtures, "reference-table directory");
  integrate->add_option("--reduction", reduction, "reduction for a custom run")
      ->check(CLI::IsMember({"travelling_wave", "equator_y2y5", "equator_y4y5"}));
  integrate->add_option("--system", system, "system for a custom run")
      ->check(CLI::IsMember({"general", "equator", "pole"}))
      ->default_str("");
  integrate->add_option("--initial", initial, "custom initial state H,U,V");
  integrate->add_option("--start", start, "custom range start");
  CLI::Option* end_opt = integrate->add_option("--end", end, "custom range end");
  integrate->add_option("--method", method, "dp45 | rk4 | euler")
      ->check(CLI::IsMember({"dp45", "rk4", "euler"}));
  integrate->add_option("--step", step, "fixed step size for rk4/euler")
      ->check(CLI::PositiveNumber);
  integrate->add_option("--tol", tol, "relative tolerance for dp45")
      ->check(CLI::PositiveNumber);
  integrate->add_option("--max-step", max_step, "dp45 step-size cap (0: range/50)");
  integrate->add_option("--omega", omega_num, "rotation rate for a custom run");
  integrate->add_option("--g", g_num, "gravity for a custom run");
  integrate->add_option("--out", out, "output prefix (default 'trajectory')");

  CLI::App* residual = app.add_subcommand(
      "residual", "Reconstruct fields from a profile and evaluate the governing equations");
  residual->add_option("--run", runid, "catalogued run id backing the profile");
  residual->add_flag("--closed-form", closed_form,
                     "use the exact scaling-pair solution instead of a run");
  residual->add_option("--fixtures", fixtures, "reference-table directory");
  residual->add_option("--delta", deltas, "finite-difference half-widths");
  residual->add_option("--omega", omega_num, "rotation rate");
  residual->add_option("--g", g_num, "gravity");
  residual->add_option("--out", out, "also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (verify->parsed())
      return run_verify(system, omega, g, advection, out);
    if (tables->parsed()) {
      const double t = tables->count("--tol") ? tol : 1e-9;
      return run_tables(fixtures, out, t);
    }
    if (reduce->parsed())
      return run_reduce(reduction, reduce->count("--system") ? system : "", speed,
                        fixtures, out);
    if (integrate->parsed()) {
      range_given = integrate->count("--start") && end_opt->count();
      return run_integrate(runid, fixtures, reduction,
                           integrate->count("--system") ? system : "", initial, start,
                           end, range_given, method, step, tol, max_step, omega_num,
                           g_num, out);
    }
    if (residual->parsed())
      return run_residual(runid, closed_form, fixtures, deltas, omega_num, g_num, out);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 64;
  } catch (const FixtureError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 66;
  } catch (const ExprError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 64;
}
