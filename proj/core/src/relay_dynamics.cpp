#include "relay_osc/relay_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relay_osc/error.hpp"
#include "relay_osc/roots.hpp"

namespace relay_osc {

namespace {

double slowest_decay(const Matrix& a) {
  const ComplexVector ev = eigenvalues(a);
  double s = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) s = std::min(s, -ev(i).real());
  return s;
}

}  // namespace

RelaySystem::RelaySystem(StateSpace ss, RelayOptions options)
    : ss_(std::move(ss)), options_(options) {
  if (ss_.order() < 1) throw Error(ErrorCode::kInvalidPlant, "empty state space");
  const double sigma = slowest_decay(ss_.a);
  t_max_ = options_.t_max ? *options_.t_max : (sigma > 0.0 ? 50.0 / sigma : 1e3);
  step_ = options_.step_hint ? *options_.step_hint : t_max_ / 1e4;
  if (!(step_ > 0.0) || !(t_max_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step hint and horizon must be positive");
  }
  step_flow_ = affine_flow(ss_.a, ss_.b, step_);
}

Vector RelaySystem::field(const Vector& x, int sign) const {
  return ss_.a * x - static_cast<double>(sign) * ss_.b;
}

Vector RelaySystem::propagate(const Vector& x, int sign, double t) const {
  const AffineFlow f = affine_flow(ss_.a, ss_.b, t);
  return f.transition * x - static_cast<double>(sign) * f.forced;
}

bool RelaySystem::on_plane(const Vector& x) const {
  return std::abs(output(x)) <= options_.plane_tolerance * (1.0 + x.norm());
}

int RelaySystem::departure_sign(const Vector& x) const {
  const double dp = output(field(x, 1));
  const double dm = output(field(x, -1));
  if (dp >= 0.0) return 1;
  if (dm < 0.0) return -1;
  return 0;
}

double RelaySystem::signed_output_after(const Vector& x, int sign, double t) const {
  return static_cast<double>(sign) * output(propagate(x, sign, t));
}

void RelaySystem::check_start(const Vector& xi, int sign) const {
  if (xi.size() != ss_.order()) {
    throw Error(ErrorCode::kInvalidArgument, "state dimension does not match the plant order");
  }
  const double y = static_cast<double>(sign) * output(xi);
  if (on_plane(xi)) {
    const double speed = static_cast<double>(sign) * output(field(xi, sign));
    if (speed < -options_.grazing_threshold) {
      throw Error(ErrorCode::kInvalidArgument,
                  "start point on the switching plane departs into the opposite half-space");
    }
  } else if (y < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "start point is not in the half-space of the requested relay sign");
  }
}

ExitResult RelaySystem::exit(const Vector& xi, int sign, std::optional<double> t_max) const {
  if (sign != 1 && sign != -1) throw Error(ErrorCode::kInvalidArgument, "relay sign must be +-1");
  if (sign == -1) {
    // tau_-(x) = tau_+(-x), psi_-(x) = -psi_+(-x)
    ExitResult r = exit(-xi, 1, t_max);
    r.x = -r.x;
    r.transversal_speed = -r.transversal_speed;
    return r;
  }
  check_start(xi, 1);
  const double horizon = t_max ? *t_max : t_max_;
  const bool start_on_plane = on_plane(xi);
  const double h = step_;

  // March with the cached one-step flow.
  Vector x_prev = xi;
  double t_prev = 0.0;
  double f_prev = start_on_plane ? 0.0 : output(xi);
  RootBracket bracket;
  bool found = false;
  Vector x_base = xi;
  double t_base = 0.0;
  while (t_prev < horizon) {
    const bool last = t_prev + h >= horizon;
    const double dt = last ? horizon - t_prev : h;
    const Vector x = last ? propagate(x_prev, 1, dt)
                          : Vector(step_flow_.transition * x_prev - step_flow_.forced);
    const double f = output(x);
    if (f <= 0.0) {
      x_base = x_prev;
      t_base = t_prev;
      bracket = RootBracket{0.0, dt, f_prev, f};
      found = true;
      break;
    }
    x_prev = x;
    t_prev += dt;
    f_prev = f;
  }
  if (!found) {
    throw Error(ErrorCode::kQuiescent,
                "no switch before t = " + std::to_string(horizon) + " (quiescent trajectory)");
  }

  const auto g = [&](double d) { return output(propagate(x_base, 1, d)); };
  if (bracket.f_lo == 0.0 && t_base == 0.0 && start_on_plane) {
    // Returned to the plane within the first step: find a positive interior sample.
    double hi = bracket.hi;
    double lo = 0.5 * hi;
    double f_lo = g(lo);
    int guard = 0;
    while (f_lo <= 0.0 && guard++ < 60) {
      hi = lo;
      lo *= 0.5;
      f_lo = g(lo);
    }
    if (f_lo <= 0.0) {
      throw Error(ErrorCode::kNonTransversal, "trajectory does not leave the switching plane");
    }
    bracket = RootBracket{lo, hi, f_lo, g(hi)};
  }
  RootOptions ro;
  ro.x_tol_rel = 1e-13;
  const double delta = refine_root(g, bracket, ro);

  ExitResult r;
  r.tau = t_base + delta;
  r.x = propagate(xi, 1, r.tau);
  // One Newton correction along the flow, then project onto C x = 0.
  const Vector v = field(r.x, 1);
  const double speed = output(v);
  if (std::abs(speed) > options_.grazing_threshold) {
    const double dt = -output(r.x) / speed;
    r.x += v * dt;
    r.tau += dt;
  }
  const double cc = ss_.c.squaredNorm();
  r.x -= ss_.c.transpose() * (output(r.x) / cc);
  r.transversal_speed = output(field(r.x, 1));
  r.grazing = std::abs(r.transversal_speed) < options_.grazing_threshold;
  return r;
}

double RelaySystem::exit_time(const Vector& xi, int sign, std::optional<double> t_max) const {
  return exit(xi, sign, t_max).tau;
}

Vector RelaySystem::exit_map(const Vector& xi, int sign) const { return exit(xi, sign).x; }

KthExitResult RelaySystem::kth_exit_map(const Vector& xi, int k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  KthExitResult out;
  Vector x = xi;
  double t = 0.0;
  for (int i = 1; i <= k; ++i) {
    ExitResult r;
    try {
      r = exit(x, 1);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(i) + " of " + std::to_string(k) + ": " +
                                e.what());
    }
    t += r.tau;
    // Physical switch states alternate in sign relative to the mirrored chain.
    const double parity = (i % 2 == 1) ? 1.0 : -1.0;
    out.events.push_back(SwitchEvent{t, parity * r.x, static_cast<int>(parity),
                                     parity * r.transversal_speed, r.grazing});
    out.image = r.x;
    x = -r.x;
  }
  return out;
}

SimulationResult RelaySystem::simulate(const Vector& x0, double t_end,
                                       const SimulateOptions& options) const {
  if (!(t_end > options.t_start)) {
    throw Error(ErrorCode::kInvalidArgument, "t_end must exceed the start time");
  }
  if (x0.size() != ss_.order()) {
    throw Error(ErrorCode::kInvalidArgument, "state dimension does not match the plant order");
  }
  SimulationResult res;
  Trajectory& traj = res.trajectory;
  double t = options.t_start;
  Vector x = x0;
  int sign = 0;
  if (on_plane(x)) {
    sign = departure_sign(x);
  } else {
    sign = output(x) > 0.0 ? 1 : -1;
  }
  if (sign == 0) {
    res.sliding = SlidingReport{true, t, x};
    traj.certified = false;
    traj.final_state = x;
    traj.t_end = t;
    return res;
  }

  const bool sampling = options.sample_dt > 0.0;
  std::size_t next_index = 0;
  AffineFlow sample_flow;
  if (sampling) sample_flow = affine_flow(ss_.a, ss_.b, options.sample_dt);
  const auto sample_time = [&](std::size_t j) {
    return options.t_start + static_cast<double>(j) * options.sample_dt;
  };
  const auto record_samples = [&](const Vector& start, double ts, double dur, int s,
                                  bool include_end) {
    if (!sampling) return;
    const double te = ts + dur;
    const auto due = [&](double tj) { return include_end ? tj <= te : tj < te; };
    if (!due(sample_time(next_index))) return;
    Vector xs = propagate(start, s, sample_time(next_index) - ts);
    while (due(sample_time(next_index))) {
      traj.sample_times.push_back(sample_time(next_index));
      traj.samples.push_back(xs);
      traj.sample_signs.push_back(s);
      ++next_index;
      xs = sample_flow.transition * xs - static_cast<double>(s) * sample_flow.forced;
    }
  };

  while (t < t_end) {
    const double remaining = t_end - t;
    ExitResult r;
    bool switched = true;
    try {
      r = exit(x, sign, remaining);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kQuiescent) throw;
      switched = false;
    }
    if (!switched || r.tau >= remaining) {
      traj.segments.push_back(Segment{x, t, remaining, sign});
      record_samples(x, t, remaining, sign, true);
      x = propagate(x, sign, remaining);
      t = t_end;
      break;
    }
    traj.segments.push_back(Segment{x, t, r.tau, sign});
    record_samples(x, t, r.tau, sign, false);
    t += r.tau;
    x = r.x;
    traj.events.push_back(SwitchEvent{t, x, sign, r.transversal_speed, r.grazing});
    if (r.grazing) traj.certified = false;
    if (traj.events.size() >= options.max_switches) break;

    // Continue with the opposite sign if it departs; otherwise both fields
    // point at the plane and the state is in the sliding set.
    const int next = -sign;
    const double depart = static_cast<double>(next) * output(field(x, next));
    if (depart < -options_.grazing_threshold) {
      res.sliding = SlidingReport{true, t, x};
      traj.certified = false;
      break;
    }
    sign = next;
  }
  traj.final_state = x;
  traj.t_end = t;
  return res;
}

}  // namespace relay_osc
