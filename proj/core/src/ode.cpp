#include "swsym/ode.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "swsym/algebra.hpp"
#include "swsym/report.hpp"

namespace swsym {

namespace {

using State = std::array<double, 3>;

constexpr char kStateNames[3] = {'H', 'U', 'V'};

State axpy(const State& y, double a, const State& k) {
  return {y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]};
}

bool finite(const State& y) {
  return std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]);
}

std::string state_text(const State& y) {
  std::ostringstream os;
  os << "(" << y[0] << ", " << y[1] << ", " << y[2] << ")";
  return os.str();
}

// Cubic Hermite value/derivative on [s0, s1] from endpoint values and slopes.
State hermite_value(double s0, const State& y0, const State& f0, double s1,
                    const State& y1, const State& f1, double s) {
  const double h = s1 - s0;
  const double th = (s - s0) / h;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  State out;
  for (int i = 0; i < 3; ++i)
    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return out;
}

State hermite_slope(double s0, const State& y0, const State& f0, double s1,
                    const State& y1, const State& f1, double s) {
  const double h = s1 - s0;
  const double th = (s - s0) / h;
  const double d00 = (6 * th * th - 6 * th) / h;
  const double d10 = 3 * th * th - 4 * th + 1;
  const double d01 = (-6 * th * th + 6 * th) / h;
  const double d11 = 3 * th * th - 2 * th;
  State out;
  for (int i = 0; i < 3; ++i)
    out[i] = d00 * y0[i] + d10 * f0[i] + d01 * y1[i] + d11 * f1[i];
  return out;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::rk4: return "rk4";
    case Method::euler: return "euler";
    case Method::dp45: return "dp45";
  }
  return "?";
}

const char* event_kind_name(EventKind k) {
  return k == EventKind::locus_crossing ? "locus_crossing" : "locus_approach";
}

// ---------------------------------------------------------------------------
// OdeFunction

OdeFunction::OdeFunction(const ReducedOde& ode,
                         const std::map<std::string, double>& params)
    : ind_(ode.independent) {
  std::set<std::string> names;
  for (char S : kStateNames) {
    auto it = ode.rhs.find(S);
    if (it == ode.rhs.end())
      throw IntegrationError(std::string("reduced system has no rate for state ") + S);
    for (const auto& n : symbols_of(it->second)) names.insert(n);
  }
  for (const auto& [id, ex] : ode.singular_loci)
    for (const auto& n : symbols_of(ex)) names.insert(n);

  std::vector<std::string> slots = {std::string(1, ind_), "H", "U", "V"};
  for (const auto& n : names) {
    if (n == slots[0] || n == "H" || n == "U" || n == "V") continue;
    auto it = params.find(n);
    if (it == params.end())
      throw IntegrationError("missing numeric value for parameter '" + n + "'");
    slots.push_back(n);
    param_values_.push_back(it->second);
  }
  if (slots.size() > 32)
    throw IntegrationError("too many free parameters in the reduced system");

  for (char S : kStateNames) rhs_.emplace_back(ode.rhs.at(S), slots);
  for (const auto& [id, ex] : ode.singular_loci)
    loci_.emplace_back(id, CompiledExpr(ex, slots));
}

void OdeFunction::fill_slots(double s, const State& y, double* slots) const {
  slots[0] = s;
  slots[1] = y[0];
  slots[2] = y[1];
  slots[3] = y[2];
  for (std::size_t i = 0; i < param_values_.size(); ++i) slots[4 + i] = param_values_[i];
}

State OdeFunction::operator()(double s, const State& y) const {
  double slots[32];
  fill_slots(s, y, slots);
  return {rhs_[0].eval(slots), rhs_[1].eval(slots), rhs_[2].eval(slots)};
}

double OdeFunction::locus(std::size_t i, double s, const State& y) const {
  double slots[32];
  fill_slots(s, y, slots);
  return loci_[i].second.eval(slots);
}

// ---------------------------------------------------------------------------
// Shared pieces

namespace {

void check_not_on_locus(const OdeFunction& f, double s, const State& y, double tol) {
  for (std::size_t i = 0; i < f.locus_count(); ++i) {
    const double v = f.locus(i, s, y);
    if (std::abs(v) <= tol)
      throw IntegrationError("initial state " + state_text(y) + " lies on singular locus '" +
                             f.locus_id(i) + "' (value " + double_text(v) + ")");
  }
}

struct EventHit {
  Event ev;
  State dy;
};

// Scan one accepted step for locus sign changes; refine the earliest crossing
// by bisection on the Hermite interpolant until |locus| < tol.
bool scan_events(const OdeFunction& f, double s0, const State& y0, const State& f0,
                 double s1, const State& y1, const State& f1, double tol,
                 EventHit* hit) {
  const double dir = s1 > s0 ? 1.0 : -1.0;
  bool any = false;
  for (std::size_t i = 0; i < f.locus_count(); ++i) {
    double v0, v1;
    try {
      v0 = f.locus(i, s0, y0);
      v1 = f.locus(i, s1, y1);
    } catch (const PoleError&) {
      continue;
    }
    if (v0 == 0.0) continue;  // guarded at the start point
    if ((v0 < 0) == (v1 < 0) && v1 != 0.0) continue;

    double a = s0, b = s1, va = v0;
    double m = s1, vm = v1;
    State ym = y1;
    for (int it = 0; it < 200; ++it) {
      m = 0.5 * (a + b);
      ym = hermite_value(s0, y0, f0, s1, y1, f1, m);
      vm = f.locus(i, m, ym);
      if (std::abs(vm) < tol) break;
      if ((vm < 0) == (va < 0)) {
        a = m;
        va = vm;
      } else {
        b = m;
      }
      if (a == b || std::nextafter(a, b) == b) break;
    }
    Event ev;
    ev.kind = EventKind::locus_crossing;
    ev.locus_id = f.locus_id(i);
    ev.location = m;
    ev.locus_value = vm;
    ev.state = ym;
    if (!any || (ev.location - hit->ev.location) * dir < 0) {
      hit->ev = ev;
      State dy;
      bool ok = true;
      try {
        dy = f(m, ym);
        ok = finite(dy);
      } catch (const PoleError&) {
        ok = false;
      }
      hit->dy = ok ? dy : hermite_slope(s0, y0, f0, s1, y1, f1, m);
      any = true;
    }
  }
  return any;
}

State checked_rhs(const OdeFunction& f, double s, const State& y) {
  State d;
  try {
    d = f(s, y);
  } catch (const PoleError&) {
    throw IntegrationError("right-hand side has a pole at " +
                           std::string(1, f.independent()) + " = " + double_text(s) +
                           ", state " + state_text(y));
  }
  if (!finite(d))
    throw IntegrationError("right-hand side is not finite at " +
                           std::string(1, f.independent()) + " = " + double_text(s) +
                           ", state " + state_text(y));
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fixed-step integration (classical RK4, Euler fallback)

Trajectory integrate_fixed(const ReducedOde& ode,
                           const std::map<std::string, double>& params,
                           const State& init, double start, double end, double step,
                           const FixedOptions& opt) {
  if (!(step > 0)) throw IntegrationError("step size must be positive");
  if (end == start) throw IntegrationError("integration range is empty");
  if (!finite(init)) throw IntegrationError("initial state is not finite");
  if (opt.method == Method::dp45)
    throw IntegrationError("dp45 is the adaptive method; use integrate_adaptive");

  OdeFunction f(ode, params);
  check_not_on_locus(f, start, init, opt.event_tol);

  Trajectory tr;
  tr.independent = ode.independent;
  tr.method = method_name(opt.method);

  const double dir = end > start ? 1.0 : -1.0;
  double s = start;
  State y = init;
  State fy = checked_rhs(f, s, y);
  tr.samples.push_back({s, y, fy});

  const long n = std::lround(std::ceil(std::abs(end - start) / step - 1e-9));
  for (long i = 0; i < n; ++i) {
    double h = dir * step;
    bool last = (i == n - 1) || ((s + h - end) * dir >= 0);
    if (last) h = end - s;
    const double s1 = last ? end : s + h;

    State y1;
    if (opt.method == Method::euler) {
      y1 = axpy(y, h, fy);
    } else {
      const State k1 = fy;
      const State k2 = checked_rhs(f, s + h / 2, axpy(y, h / 2, k1));
      const State k3 = checked_rhs(f, s + h / 2, axpy(y, h / 2, k2));
      const State k4 = checked_rhs(f, s + h, axpy(y, h, k3));
      for (int c = 0; c < 3; ++c)
        y1[c] = y[c] + h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    if (!finite(y1))
      throw IntegrationError("state became non-finite during the step to " +
                             double_text(s1));
    const State f1 = checked_rhs(f, s1, y1);

    EventHit hit;
    if (scan_events(f, s, y, fy, s1, y1, f1, opt.event_tol, &hit)) {
      tr.events.push_back(hit.ev);
      tr.samples.push_back({hit.ev.location, hit.ev.state, hit.dy});
      tr.truncated = true;
      return tr;
    }

    s = s1;
    y = y1;
    fy = f1;
    tr.samples.push_back({s, y, fy});
    ++tr.steps_accepted;
    if (last) break;
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 4(5)

Trajectory integrate_adaptive(const ReducedOde& ode,
                              const std::map<std::string, double>& params,
                              const State& init, double start, double end,
                              const AdaptiveOptions& opt) {
  if (end == start) throw IntegrationError("integration range is empty");
  if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0))
    throw IntegrationError("tolerances must be positive");
  if (!finite(init)) throw IntegrationError("initial state is not finite");

  OdeFunction f(ode, params);
  check_not_on_locus(f, start, init, opt.event_tol);

  Trajectory tr;
  tr.independent = ode.independent;
  tr.method = method_name(Method::dp45);
  tr.rel_tol = opt.rel_tol;
  tr.abs_tol = opt.abs_tol;

  const double dir = end > start ? 1.0 : -1.0;
  const double range = std::abs(end - start);
  const double max_step = opt.max_step > 0 ? opt.max_step : range / 50;
  const double hmin = range * 1e-12;
  double h = dir * std::min(opt.initial_step > 0 ? opt.initial_step : range * 1e-3,
                            max_step);

  // Dormand-Prince coefficients
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double s = start;
  State y = init;
  State k1 = checked_rhs(f, s, y);
  tr.samples.push_back({s, y, k1});

  double err_prev = 1.0;
  bool last_rejected = false;

  while (s != end) {
    if (tr.steps_accepted + tr.steps_rejected > opt.max_steps)
      throw IntegrationError("step limit exceeded at " + double_text(s));
    if ((s + h - end) * dir > 0) h = end - s;

    bool attempt_ok = true;
    double err = std::numeric_limits<double>::infinity();
    State y5{}, k7{};
    try {
      const State k2 = f(s + h / 5, axpy(y, h * a21, k1));
      State yt;
      for (int c = 0; c < 3; ++c) yt[c] = y[c] + h * (a31 * k1[c] + a32 * k2[c]);
      const State k3 = f(s + 3 * h / 10, yt);
      for (int c = 0; c < 3; ++c)
        yt[c] = y[c] + h * (a41 * k1[c] + a42 * k2[c] + a43 * k3[c]);
      const State k4 = f(s + 4 * h / 5, yt);
      for (int c = 0; c < 3; ++c)
        yt[c] = y[c] + h * (a51 * k1[c] + a52 * k2[c] + a53 * k3[c] + a54 * k4[c]);
      const State k5 = f(s + 8 * h / 9, yt);
      for (int c = 0; c < 3; ++c)
        yt[c] = y[c] +
                h * (a61 * k1[c] + a62 * k2[c] + a63 * k3[c] + a64 * k4[c] + a65 * k5[c]);
      const State k6 = f(s + h, yt);
      for (int c = 0; c < 3; ++c)
        y5[c] = y[c] + h * (b1 * k1[c] + b3 * k3[c] + b4 * k4[c] + b5 * k5[c] + b6 * k6[c]);
      k7 = f(s + h, y5);

      if (!finite(k2) || !finite(k3) || !finite(k4) || !finite(k5) || !finite(k6) ||
          !finite(y5) || !finite(k7)) {
        attempt_ok = false;
      } else {
        double acc = 0;
        for (int c = 0; c < 3; ++c) {
          const double ec = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] +
                                 e6 * k6[c] + e7 * k7[c]);
          const double sc =
              opt.abs_tol + opt.rel_tol * std::max(std::abs(y[c]), std::abs(y5[c]));
          acc += (ec / sc) * (ec / sc);
        }
        err = std::sqrt(acc / 3);
        if (!std::isfinite(err)) attempt_ok = false;
      }
    } catch (const PoleError&) {
      attempt_ok = false;
    }

    if (attempt_ok && err <= 1.0) {
      const double s1 = (s + h == end || (s + h - end) * dir > 0) ? end : s + h;
      EventHit hit;
      if (scan_events(f, s, y, k1, s1, y5, k7, opt.event_tol, &hit)) {
        tr.events.push_back(hit.ev);
        tr.samples.push_back({hit.ev.location, hit.ev.state, hit.dy});
        tr.truncated = true;
        return tr;
      }
      s = s1;
      y = y5;
      k1 = k7;
      tr.samples.push_back({s, y, k1});
      ++tr.steps_accepted;

      double fac = (err == 0) ? 5.0
                              : 0.9 * std::pow(err, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
      if (last_rejected) fac = std::min(fac, 1.0);
      fac = std::clamp(fac, 0.2, 5.0);
      h = dir * std::min(std::abs(h) * fac, max_step);
      err_prev = std::max(err, 1e-4);
      last_rejected = false;
    } else {
      ++tr.steps_rejected;
      const double fac =
          attempt_ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h = dir * (std::abs(h) * fac);
      last_rejected = true;
    }

    if (std::abs(h) < hmin && s != end) {
      // step collapse: blame the nearest singular locus if one is close
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < f.locus_count(); ++i) {
        double v;
        try {
          v = f.locus(i, s, y);
        } catch (const PoleError&) {
          v = 0;
        }
        if (std::abs(v) < std::abs(best)) {
          best = v;
          best_i = i;
        }
      }
      if (f.locus_count() > 0 && std::abs(best) < opt.approach_tol) {
        Event ev;
        ev.kind = EventKind::locus_approach;
        ev.locus_id = f.locus_id(best_i);
        ev.location = s;
        ev.locus_value = best;
        ev.state = y;
        tr.events.push_back(ev);
        tr.truncated = true;
        return tr;
      }
      throw IntegrationError("step size underflow at " + double_text(s) +
                             " with no singular locus nearby");
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Convergence diagnostics

ConvergenceReport convergence_order(const ReducedOde& ode,
                                    const std::map<std::string, double>& params,
                                    const State& init, double start, double end,
                                    const std::vector<double>& steps, Method method) {
  if (steps.size() < 2)
    throw IntegrationError("convergence study needs at least two step sizes");
  ConvergenceReport rep;
  rep.steps = steps;
  std::sort(rep.steps.begin(), rep.steps.end(), std::greater<double>());

  FixedOptions opt;
  opt.method = method;
  auto endpoint = [&](double st) {
    Trajectory t = integrate_fixed(ode, params, init, start, end, st, opt);
    if (t.truncated)
      throw IntegrationError("convergence range crosses a singular locus");
    return t.samples.back().y;
  };

  const State ref = endpoint(rep.steps.back() / 4);
  for (double st : rep.steps) {
    const State y = endpoint(st);
    double e = 0;
    for (int c = 0; c < 3; ++c) e = std::max(e, std::abs(y[c] - ref[c]));
    rep.errors.push_back(e);
  }
  for (std::size_t i = 1; i < rep.errors.size(); ++i)
    if (!(rep.errors[i] < rep.errors[i - 1])) rep.monotone = false;

  // least-squares slope of log error against log step
  const std::size_t n = rep.steps.size();
  double mx = 0, my = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(rep.steps[i]);
    ly[i] = std::log(std::max(rep.errors[i], 1e-300));
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.order = num / den;
  return rep;
}

// ---------------------------------------------------------------------------
// Dense output and file emission

std::array<double, 3> Trajectory::dense(double s) const {
  if (samples.empty()) throw RangeError("trajectory has no samples");
  if (samples.size() == 1) {
    if (s == samples[0].s) return samples[0].y;
    throw RangeError("trajectory holds a single sample at " + double_text(samples[0].s));
  }
  const bool inc = samples.back().s > samples.front().s;
  const double lo = inc ? samples.front().s : samples.back().s;
  const double hi = inc ? samples.back().s : samples.front().s;
  if (s < lo || s > hi)
    throw RangeError("requested point " + double_text(s) + " outside trajectory range [" +
                     double_text(lo) + ", " + double_text(hi) + "]");

  std::size_t a = 0, b = samples.size() - 1;
  while (b - a > 1) {
    const std::size_t m = (a + b) / 2;
    const bool left = inc ? (samples[m].s <= s) : (samples[m].s >= s);
    if (left)
      a = m;
    else
      b = m;
  }
  const TrajectorySample& p = samples[a];
  const TrajectorySample& q = samples[b];
  if (s == p.s) return p.y;
  if (s == q.s) return q.y;
  return hermite_value(p.s, p.y, p.dy, q.s, q.y, q.dy, s);
}

std::pair<double, double> TrajectorySampler::domain() const {
  if (t_->samples.empty()) throw RangeError("trajectory has no samples");
  const double a = t_->samples.front().s;
  const double b = t_->samples.back().s;
  return {std::min(a, b), std::max(a, b)};
}

void write_trajectory_csv(const Trajectory& t, const std::string& path) {
  std::string out = "indep_var,H,U,V,dH,dU,dV\n";
  for (const TrajectorySample& smp : t.samples) {
    out += double_text(smp.s);
    for (int c = 0; c < 3; ++c) out += "," + double_text(smp.y[c]);
    for (int c = 0; c < 3; ++c) out += "," + double_text(smp.dy[c]);
    out += "\n";
  }
  write_text_file(path, out);
}

std::string events_json_text(const Trajectory& t) {
  JsonValue root = JsonValue::object();
  root.set("independent", JsonValue::string(std::string(1, t.independent)));
  root.set("method", JsonValue::string(t.method));
  root.set("rel_tol", JsonValue::number(t.rel_tol));
  root.set("abs_tol", JsonValue::number(t.abs_tol));
  root.set("steps_accepted", JsonValue::integer(static_cast<long long>(t.steps_accepted)));
  root.set("steps_rejected", JsonValue::integer(static_cast<long long>(t.steps_rejected)));
  root.set("samples", JsonValue::integer(static_cast<long long>(t.samples.size())));
  root.set("truncated", JsonValue::boolean(t.truncated));
  JsonValue evs = JsonValue::array();
  for (const Event& e : t.events) {
    JsonValue j = JsonValue::object();
    j.set("kind", JsonValue::string(event_kind_name(e.kind)));
    j.set("locus_id", JsonValue::string(e.locus_id));
    j.set("location", JsonValue::number(e.location));
    j.set("locus_value", JsonValue::number(e.locus_value));
    JsonValue st = JsonValue::array();
    for (double c : e.state) st.push(JsonValue::number(c));
    j.set("state", std::move(st));
    evs.push(std::move(j));
  }
  root.set("events", std::move(evs));
  return root.render() + "\n";
}

void write_events_json(const Trajectory& t, const std::string& path) {
  write_text_file(path, events_json_text(t));
}

// ---------------------------------------------------------------------------
// Figure-run fixture

const FigureRun& FigureRunSet::at(const std::string& id) const {
  for (const FigureRun& r : runs)
    if (r.id == id) return r;
  throw FixtureError("no catalogued run with id '" + id + "'");
}

FigureRunSet load_figure_runs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open reference table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw FixtureError("malformed reference table " + path + ": " + ex.what());
  }
  FigureRunSet set;
  try {
    set.name = j.value("name", "");
    for (const auto& r : j.at("runs")) {
      FigureRun run;
      run.id = r.at("id").get<std::string>();
      run.reduction = r.at("reduction").get<std::string>();
      run.system = r.at("system").get<std::string>();
      for (const auto& [k, v] : r.at("params").items())
        run.params[k] = v.get<double>();
      const auto& ini = r.at("initial");
      run.initial = {ini.at("H").get<double>(), ini.at("U").get<double>(),
                     ini.at("V").get<double>()};
      run.start = r.at("start").get<double>();
      run.end = r.at("end").get<double>();
      set.runs.push_back(std::move(run));
    }
    if (j.contains("notes"))
      for (const auto& n : j.at("notes")) set.notes.push_back(n.get<std::string>());
  } catch (const nlohmann::json::exception& ex) {
    throw FixtureError("malformed reference table " + path + ": " + ex.what());
  }
  return set;
}

}  // namespace swsym
