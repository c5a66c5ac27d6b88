#include "relay_osc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "relay_osc/error.hpp"

namespace relay_osc {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

Vector to_vector(const State& s) { return Eigen::Map<const Vector>(s.data(), s.size()); }

[[noreturn]] void underflow(double t, double h) {
  throw Error(ErrorCode::kStepUnderflow,
              "step size " + std::to_string(h) + " fell below the floor at t = " +
                  std::to_string(t) + "; try a smaller gamma or a tighter tolerance budget");
}

}  // namespace

Vector DenseTrajectory::operator()(double t) const {
  if (t <= step_times.front()) return step_states.front();
  if (t >= step_times.back()) return step_states.back();
  const auto it = std::upper_bound(step_times.begin(), step_times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - step_times.begin()) - 1;
  const double h = step_times[i + 1] - step_times[i];
  const double s = (t - step_times[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * step_states[i] + h10 * h * step_slopes[i] + h01 * step_states[i + 1] +
         h11 * h * step_slopes[i + 1];
}

DenseTrajectory integrate_adaptive(const VectorField& rhs, const Vector& x0, double t0,
                                   double t1, const OdeOptions& options,
                                   const StepObserver& observer) {
  if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "integrate_adaptive: tolerances must be positive");
  }
  if (!(t1 > t0)) throw Error(ErrorCode::kInvalidArgument, "integrate_adaptive: empty span");

  const Eigen::Index n = x0.size();
  Vector xbuf(n);
  Vector dbuf(n);
  auto sys = [&](const State& x, State& dxdt, double t) {
    xbuf = Eigen::Map<const Vector>(x.data(), n);
    rhs(t, xbuf, dbuf);
    dxdt.assign(dbuf.data(), dbuf.data() + n);
  };
  auto slope = [&](double t, const Vector& x) {
    Vector d(n);
    rhs(t, x, d);
    return d;
  };

  using Dopri = odeint::runge_kutta_dopri5<State>;
  auto stepper = std::isfinite(options.max_step)
                     ? odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                                 options.max_step, Dopri())
                     : odeint::make_dense_output(options.abs_tol, options.rel_tol, Dopri());

  DenseTrajectory out;
  out.step_times.push_back(t0);
  out.step_states.push_back(x0);
  out.step_slopes.push_back(slope(t0, x0));

  double next_sample = t0;
  const bool sampling = options.sample_dt > 0.0;
  std::size_t sample_index = 0;
  if (sampling) {
    out.sample_times.push_back(t0);
    out.samples.push_back(x0);
    next_sample = t0 + options.sample_dt;
    sample_index = 1;
  }

  const double h0 = options.initial_step > 0.0 ? options.initial_step : 1e-3 * (t1 - t0);
  State state(x0.data(), x0.data() + n);
  stepper.initialize(state, t0, std::min(h0, options.max_step));

  State tmp(n);
  std::size_t steps = 0;
  while (stepper.current_time() < t1) {
    if (++steps > options.max_steps) {
      throw Error(ErrorCode::kStepUnderflow,
                  "step budget exhausted at t = " + std::to_string(stepper.current_time()) +
                      "; try a smaller gamma or a tighter tolerance budget");
    }
    std::pair<double, double> span;
    try {
      span = stepper.do_step(sys);
    } catch (const odeint::step_adjustment_error&) {
      underflow(stepper.current_time(), stepper.current_time_step());
    }
    const double tp = span.first;
    const double tc = std::min(span.second, t1);
    if (tc < t1 && span.second - tp < options.min_step) underflow(tp, span.second - tp);

    auto state_at = [&](double t) {
      stepper.calc_state(t, tmp);
      return to_vector(tmp);
    };
    while (sampling && next_sample <= tc + 1e-12 * std::abs(tc)) {
      const double ts = std::min(next_sample, tc);
      out.sample_times.push_back(ts);
      out.samples.push_back(state_at(ts));
      ++sample_index;
      next_sample = t0 + static_cast<double>(sample_index) * options.sample_dt;
    }
    const Vector x = span.second > t1 ? state_at(t1) : to_vector(stepper.current_state());
    out.step_times.push_back(tc);
    out.step_states.push_back(x);
    out.step_slopes.push_back(slope(tc, x));
    if (observer && observer(StepView{tp, tc, x, state_at})) {
      out.stopped_early = true;
      break;
    }
  }
  return out;
}

}  // namespace relay_osc
