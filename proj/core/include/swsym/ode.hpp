#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "swsym/calculus.hpp"
#include "swsym/expr.hpp"
#include "swsym/reduction.hpp"

namespace swsym {

struct IntegrationError : ExprError {
  using ExprError::ExprError;
};

enum class Method { rk4, euler, dp45 };
const char* method_name(Method m);

enum class EventKind { locus_crossing, locus_approach };
const char* event_kind_name(EventKind k);

// A singular-locus encounter: either a sign change pinned down by bisection
// (crossing) or a step-size collapse next to a locus (approach).
struct Event {
  EventKind kind = EventKind::locus_crossing;
  std::string locus_id;
  double location = 0;     // independent-variable value
  double locus_value = 0;  // locus expression there
  std::array<double, 3> state{0, 0, 0};
};

struct TrajectorySample {
  double s = 0;
  std::array<double, 3> y{0, 0, 0};   // H, U, V
  std::array<double, 3> dy{0, 0, 0};  // rhs at the sample
};

struct Trajectory {
  char independent = 'w';
  std::string method;
  double rel_tol = 0;
  double abs_tol = 0;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  bool truncated = false;  // stopped before the requested end
  std::vector<TrajectorySample> samples;
  std::vector<Event> events;

  // Cubic Hermite interpolation between stored samples (value + derivative).
  std::array<double, 3> dense(double s) const;
};

// Numeric view of a reduced system at fixed parameter values; compiled once,
// evaluated throughout the integration inner loop.
class OdeFunction {
 public:
  OdeFunction(const ReducedOde& ode, const std::map<std::string, double>& params);
  std::array<double, 3> operator()(double s, const std::array<double, 3>& y) const;
  std::size_t locus_count() const { return loci_.size(); }
  const std::string& locus_id(std::size_t i) const { return loci_[i].first; }
  double locus(std::size_t i, double s, const std::array<double, 3>& y) const;
  char independent() const { return ind_; }

 private:
  char ind_ = 'w';
  std::vector<CompiledExpr> rhs_;
  std::vector<std::pair<std::string, CompiledExpr>> loci_;
  std::vector<double> param_values_;
  void fill_slots(double s, const std::array<double, 3>& y, double* slots) const;
};

struct FixedOptions {
  Method method = Method::rk4;
  double event_tol = 1e-10;
};

Trajectory integrate_fixed(const ReducedOde& ode,
                           const std::map<std::string, double>& params,
                           const std::array<double, 3>& init, double start,
                           double end, double step, const FixedOptions& opt = {});

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double event_tol = 1e-10;
  double approach_tol = 1e-3;  // |locus| below this classifies an underflow
  double initial_step = 0;     // 0: range/1000
  double max_step = 0;         // 0: range/50
  std::size_t max_steps = 200000;
};

// Dormand-Prince 4(5) with first-same-as-last reuse and PI step control.
Trajectory integrate_adaptive(const ReducedOde& ode,
                              const std::map<std::string, double>& params,
                              const std::array<double, 3>& init, double start,
                              double end, const AdaptiveOptions& opt = {});

struct ConvergenceReport {
  double order = 0;
  bool monotone = true;  // errors strictly decreased with the step size
  std::vector<double> steps;
  std::vector<double> errors;  // endpoint max-norm error vs finest-step reference
};

ConvergenceReport convergence_order(const ReducedOde& ode,
                                    const std::map<std::string, double>& params,
                                    const std::array<double, 3>& init, double start,
                                    double end, const std::vector<double>& steps,
                                    Method method = Method::rk4);

// Header row indep_var,H,U,V,dH,dU,dV then one %.17g row per sample.
void write_trajectory_csv(const Trajectory& t, const std::string& path);
// Sidecar with integrator metadata and the event log.
void write_events_json(const Trajectory& t, const std::string& path);
std::string events_json_text(const Trajectory& t);

// Hermite view of a trajectory for field reconstruction.
class TrajectorySampler : public StateSampler {
 public:
  explicit TrajectorySampler(const Trajectory& t) : t_(&t) {}
  std::array<double, 3> operator()(double s) const override { return t_->dense(s); }
  std::pair<double, double> domain() const override;

 private:
  const Trajectory* t_;
};

// One catalogued integration run (figure-reproduction inputs live in a
// fixture file because the source does not print its initial states).
struct FigureRun {
  std::string id;
  std::string reduction;  // travelling_wave | equator_y2y5 | equator_y4y5
  std::string system;     // general | equator | pole
  std::map<std::string, double> params;
  std::array<double, 3> initial{0, 0, 0};
  double start = 0;
  double end = 0;
};

struct FigureRunSet {
  std::string name;
  std::vector<FigureRun> runs;
  std::vector<std::string> notes;

  const FigureRun& at(const std::string& id) const;
};

FigureRunSet load_figure_runs(const std::string& path);

}  // namespace swsym
