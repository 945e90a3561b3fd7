#include "doctest.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "swsym/algebra.hpp"
#include "swsym/model.hpp"
#include "swsym/ode.hpp"
#include "swsym/parse.hpp"
#include "swsym/reduction.hpp"

using namespace swsym;

namespace {

const std::string kFixtures = SWSYM_FIXTURE_DIR;

PdeSystem general_sym() {
  return build_general(Expr::parameter("Omega_y"), Expr::parameter("Omega_z"),
                       Expr::parameter("g"));
}

PdeSystem equator_sym() {
  return build_equator(Expr::parameter("Omega"), Expr::parameter("g"));
}

// First-order system whose flow the fixed marches are tested against:
// H' = -H/t^2 has the closed form H(t) = H(1) * exp(1/t - 1).
ReducedOde inverse_square_decay() {
  ReducedOde ode;
  ode.name = "toy";
  ode.independent = 't';
  ode.states = {'H', 'U', 'V'};
  ode.rhs = {{'H', parse_expr("-H/t^2")}, {'U', Expr(0L)}, {'V', Expr(0L)}};
  return ode;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("fixed fourth-order march reproduces the scaling-pair closed form") {
  ReducedOde ode = derive_equator_y2y5(equator_sym());
  std::map<std::string, double> params{{"Omega", 1.0}};
  Trajectory t = integrate_fixed(ode, params, {1.0, 0.0, 1.0}, 1.0, 2.0, 1e-3);

  CHECK(t.method == "rk4");
  CHECK(t.independent == 't');
  CHECK(t.samples.size() == 1001);
  CHECK(t.steps_accepted == 1000);
  CHECK(t.samples.back().s == 2.0);
  CHECK_FALSE(t.truncated);
  CHECK(t.events.empty());

  // closed form at t = 2: H = 1/2, U = -1/2 + 1, V = 1/2
  const auto y = t.samples.back().y;
  CHECK(std::fabs(y[0] - 0.5) < 1e-12);
  CHECK(std::fabs(y[1] - 0.5) < 1e-12);
  CHECK(std::fabs(y[2] - 0.5) < 1e-12);

  // dense output interpolates between stored nodes
  const auto mid = t.dense(1.5);
  CHECK(mid[0] == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK_THROWS_AS(t.dense(0.5), RangeError);
  CHECK_THROWS_AS(t.dense(2.5), RangeError);
}

TEST_CASE("the fixed march is exact on the homogeneous-in-t system") {
  // One fourth-order step across [t, t+h] maps V exactly to V * t/(t+h), so
  // refining the step changes the endpoint only at rounding level and no
  // convergence rate can be measured on this system.
  ReducedOde ode = derive_equator_y2y5(equator_sym());
  std::map<std::string, double> params{{"Omega", 1.0}};
  ConvergenceReport rep = convergence_order(ode, params, {1.0, 0.0, 1.0}, 1.0, 2.0,
                                            {0.1, 0.05, 0.025, 0.0125});
  REQUIRE(rep.errors.size() == 4);
  for (double e : rep.errors) CHECK(e < 1e-12);
}

TEST_CASE("fourth-order convergence shows on the inverse-square decay") {
  std::map<std::string, double> params;
  ConvergenceReport rep =
      convergence_order(inverse_square_decay(), params, {1.0, 0.0, 0.0}, 1.0, 2.0,
                        {0.1, 0.05, 0.025, 0.0125});
  CHECK(rep.order == doctest::Approx(4.033).epsilon(1e-2));
  CHECK(rep.monotone);
  REQUIRE(rep.errors.size() == 4);
  CHECK(rep.errors[0] == doctest::Approx(4.680e-7).epsilon(1e-2));
  for (std::size_t i = 1; i < rep.errors.size(); ++i) {
    const double ratio = rep.errors[i - 1] / rep.errors[i];
    CHECK(ratio > 16.0 * 0.9);
    CHECK(ratio < 16.0 * 1.1);
  }
}

TEST_CASE("first-order fallback converges at first order") {
  std::map<std::string, double> params;
  ConvergenceReport rep =
      convergence_order(inverse_square_decay(), params, {1.0, 0.0, 0.0}, 1.0, 2.0,
                        {0.1, 0.05, 0.025, 0.0125}, Method::euler);
  CHECK(rep.order > 0.8);
  CHECK(rep.order < 1.2);
  CHECK(rep.monotone);
}

TEST_CASE("adaptive integration matches the closed form and its own refinements") {
  ReducedOde ode = derive_equator_y2y5(equator_sym());
  std::map<std::string, double> params{{"Omega", 1.0}};

  Trajectory t = integrate_adaptive(ode, params, {1.0, 0.0, 1.0}, 1.0, 2.0);
  CHECK(t.method == "dp45");
  CHECK(t.rel_tol == 1e-8);
  CHECK(t.steps_accepted > 10);
  CHECK_FALSE(t.truncated);
  const auto y = t.samples.back().y;
  CHECK(std::fabs(y[0] - 0.5) < 1e-6);
  CHECK(std::fabs(y[1] - 0.5) < 1e-6);
  CHECK(std::fabs(y[2] - 0.5) < 1e-6);

  // tightening the tolerance moves the endpoint by far less than the looser one
  AdaptiveOptions loose;
  loose.rel_tol = 1e-6;
  loose.abs_tol = 1e-8;
  AdaptiveOptions tight;
  tight.rel_tol = 1e-9;
  tight.abs_tol = 1e-11;
  Trajectory tl = integrate_adaptive(ode, params, {1.0, 0.0, 1.0}, 1.0, 2.0, loose);
  Trajectory tt = integrate_adaptive(ode, params, {1.0, 0.0, 1.0}, 1.0, 2.0, tight);
  for (int c = 0; c < 3; ++c)
    CHECK(std::fabs(tl.samples.back().y[c] - tt.samples.back().y[c]) < 1e-5);

  // integrating back from the endpoint recovers the initial state
  Trajectory back = integrate_adaptive(ode, params, t.samples.back().y, 2.0, 1.0);
  CHECK(back.samples.back().s == 1.0);
  CHECK(std::fabs(back.samples.back().y[0] - 1.0) < 1e-6);
  CHECK(std::fabs(back.samples.back().y[1] - 0.0) < 1e-6);
  CHECK(std::fabs(back.samples.back().y[2] - 1.0) < 1e-6);
}

TEST_CASE("catalogued wave runs integrate cleanly in both directions") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  ReducedOde tw = derive_travelling_wave(general_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;

  for (const char* id : {"wave_1", "wave_2", "wave_3", "wave_1_left", "wave_2_left",
                         "wave_3_left"}) {
    CAPTURE(id);
    const FigureRun& r = runs.at(id);
    Trajectory t = integrate_adaptive(tw, r.params, r.initial, r.start, r.end, opt);
    CHECK_FALSE(t.truncated);
    CHECK(t.events.empty());
    CHECK(t.samples.back().s == r.end);
    for (const TrajectorySample& s : t.samples) CHECK(s.y[0] > 0);
  }

  const FigureRun& r1 = runs.at("wave_1");
  Trajectory t1 = integrate_adaptive(tw, r1.params, r1.initial, r1.start, r1.end, opt);
  CHECK(t1.samples.back().y[0] == doctest::Approx(1.44429).epsilon(1e-4));
  CHECK(t1.samples.back().y[1] == doctest::Approx(-0.209494).epsilon(1e-4));
  CHECK(t1.samples.back().y[2] == doctest::Approx(0.547773).epsilon(1e-4));
}

TEST_CASE("a travelling profile stalls against the determinant locus") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  const FigureRun& r = runs.at("wave_approach");
  ReducedOde tw = derive_travelling_wave(general_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  opt.max_step = 0.01;

  Trajectory t = integrate_adaptive(tw, r.params, r.initial, r.start, r.end, opt);
  CHECK(t.truncated);
  REQUIRE(t.events.size() == 1);
  const Event& e = t.events.front();
  CHECK(e.kind == EventKind::locus_approach);
  CHECK(e.locus_id == "determinant");
  CHECK(e.location == doctest::Approx(2.11110).epsilon(5e-4));
  CHECK(std::fabs(e.locus_value) < 1e-3);
  CHECK(t.samples.back().s < r.end);
}

TEST_CASE("scaling profiles terminate exactly on the pivot locus") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  ReducedOde sc = derive_equator_y4y5(equator_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;

  const std::pair<const char*, double> expected[] = {
      {"scaling_1", 0.50488689},
      {"scaling_2", 0.97340884},
      {"scaling_3", 0.69726210},
      {"scaling_4", 1.05250199},
  };
  for (const auto& [id, wstar] : expected) {
    CAPTURE(id);
    const FigureRun& r = runs.at(id);
    Trajectory t = integrate_adaptive(sc, r.params, r.initial, r.start, r.end, opt);
    CHECK(t.truncated);
    REQUIRE(t.events.size() == 1);
    const Event& e = t.events.front();
    CHECK(e.kind == EventKind::locus_crossing);
    CHECK(e.locus_id == "pivot_V");
    CHECK(e.location == doctest::Approx(wstar).epsilon(1e-6));
    CHECK(std::fabs(e.state[1] - e.location) < 1e-10);  // |U - w| at the stop
    CHECK(e.state[2] == 0.0);  // V began and stays identically zero
  }
}

TEST_CASE("a stalling profile is reported as an approach, not a crossing") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  const FigureRun& r = runs.at("scaling_stall");
  ReducedOde sc = derive_equator_y4y5(equator_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;

  Trajectory t = integrate_adaptive(sc, r.params, r.initial, r.start, r.end, opt);
  CHECK(t.truncated);
  REQUIRE(t.events.size() == 1);
  const Event& e = t.events.front();
  CHECK(e.kind == EventKind::locus_approach);
  CHECK(e.locus_id == "pivot_V");
  CHECK(e.location == doctest::Approx(0.97340883).epsilon(1e-4));
  CHECK(std::fabs(e.state[1] - e.location) < 1e-9);
  CHECK(e.state[2] > 0);        // V collapses toward zero with the square root
  CHECK(e.state[2] < 1e-4);     // of the remaining distance but never crosses
}

TEST_CASE("trajectory-backed reconstruction keeps the governing equations to second order") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  const FigureRun& r = runs.at("wave_1");
  ReducedOde tw = derive_travelling_wave(general_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  opt.max_step = 0.005;
  Trajectory t = integrate_adaptive(tw, r.params, r.initial, r.start, r.end, opt);
  TrajectorySampler sampler(t);
  CHECK(sampler.domain().first == 0.0);
  CHECK(sampler.domain().second == 2.5);

  PdeSystem sys = general_sym();
  SimilarityAnsatz ansatz = travelling_wave_ansatz();
  const std::vector<ProbePoint> probes{
      {0.1, 0.5, 0.2}, {0.05, 1.0, 0.6}, {0.2, 2.0, 0.7}, {0.0, 0.2, 0.0}};

  ResidualReport coarse = reconstruct_residual(sys, ansatz, sampler, 1e-2, probes,
                                               r.params);
  ResidualReport fine = reconstruct_residual(sys, ansatz, sampler, 2.5e-3, probes,
                                             r.params);
  CHECK(coarse.probes_used == 4);
  CHECK(fine.probes_used == 4);
  CHECK(coarse.max_residual == doctest::Approx(1.0618e-5).epsilon(5e-2));
  CHECK(coarse.max_residual <= 1.0 * (1e-2 * 1e-2 + 1e-8));
  CHECK(fine.max_residual <= 1.0 * (2.5e-3 * 2.5e-3 + 1e-8));
  CHECK(coarse.max_residual / fine.max_residual == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("emitted run artifacts follow the documented layout") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  const FigureRun& r = runs.at("scaling_2");
  ReducedOde sc = derive_equator_y4y5(equator_sym());
  AdaptiveOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  Trajectory t = integrate_adaptive(sc, r.params, r.initial, r.start, r.end, opt);

  write_trajectory_csv(t, "ode_artifact.csv");
  const std::string csv = slurp("ode_artifact.csv");
  CHECK(csv.rfind("indep_var,H,U,V,dH,dU,dV\n", 0) == 0);
  CHECK(csv.substr(csv.find('\n') + 1, 8) == "0,1,2,0,");
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == t.samples.size() + 1);  // header + one line per sample

  const std::string js = events_json_text(t);
  CHECK(js == events_json_text(t));  // deterministic render
  CHECK(js.find("\"method\": \"dp45\"") != std::string::npos);
  CHECK(js.find("\"truncated\": true") != std::string::npos);
  CHECK(js.find("\"kind\": \"locus_crossing\"") != std::string::npos);
  CHECK(js.find("\"locus_id\": \"pivot_V\"") != std::string::npos);
  write_events_json(t, "ode_artifact_events.json");
  CHECK(slurp("ode_artifact_events.json") == js);
}

TEST_CASE("misuse is rejected with diagnostics") {
  ReducedOde sc = derive_equator_y4y5(equator_sym());
  std::map<std::string, double> params{{"Omega", 1.0}, {"g", 10.0}};

  // starting state sits on the U - w pivot
  CHECK_THROWS_WITH_AS(
      integrate_adaptive(sc, params, {1.0, 1.0, 0.0}, 1.0, 2.0),
      "initial state (1, 1, 0) lies on singular locus 'pivot_V' (value 0)",
      IntegrationError);

  std::map<std::string, double> missing{{"g", 10.0}};
  CHECK_THROWS_WITH_AS(integrate_adaptive(sc, missing, {1.0, 2.0, 0.0}, 0.0, 1.0),
                       "missing numeric value for parameter 'Omega'",
                       IntegrationError);

  FixedOptions dp;
  dp.method = Method::dp45;
  CHECK_THROWS_AS(integrate_fixed(sc, params, {1.0, 2.0, 0.0}, 0.0, 1.0, 0.1, dp),
                  IntegrationError);
  CHECK_THROWS_AS(integrate_fixed(sc, params, {1.0, 2.0, 0.0}, 0.0, 0.0, 0.1),
                  IntegrationError);
  CHECK_THROWS_AS(integrate_fixed(sc, params, {1.0, 2.0, 0.0}, 0.0, 1.0, -0.1),
                  IntegrationError);
  CHECK_THROWS_AS(convergence_order(sc, params, {1.0, 2.0, 0.0}, 0.0, 1.0, {0.1}),
                  IntegrationError);
}

TEST_CASE("the run catalogue loads with stable identities") {
  FigureRunSet runs = load_figure_runs(kFixtures + "/figure_runs.json");
  CHECK(runs.runs.size() == 12);

  std::set<std::string> ids;
  for (const FigureRun& r : runs.runs) ids.insert(r.id);
  CHECK(ids.size() == runs.runs.size());

  const FigureRun& ap = runs.at("wave_approach");
  CHECK(ap.end == 4.0);
  CHECK(ap.system == "general");
  CHECK(ap.reduction == "travelling_wave");
  CHECK(ap.params.at("g") == 10.0);

  bool caveat = false;
  for (const std::string& n : runs.notes)
    if (n.find("not authoritative") != std::string::npos) caveat = true;
  CHECK(caveat);

  CHECK_THROWS_AS(runs.at("no_such_run"), FixtureError);
  CHECK_THROWS_AS(load_figure_runs(kFixtures + "/absent.json"), FixtureError);
}
