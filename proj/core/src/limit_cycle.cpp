#include "relay_osc/limit_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relay_osc/bounds.hpp"
#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/roots.hpp"
#include "relay_osc/sfs.hpp"

namespace relay_osc {

namespace {

Vector equilibrium_offset(const StateSpace& ss) {
  const auto lu = ss.a.fullPivLu();
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kInvalidArgument, "symmetric orbit search needs an invertible A");
  }
  return lu.solve(ss.b);
}

Vector anchor_for(const StateSpace& ss, const Vector& w, double tau) {
  const Eigen::Index n = ss.order();
  const Matrix e = expm(ss.a, tau);
  const Matrix identity = Matrix::Identity(n, n);
  return (e + identity).partialPivLu().solve((e - identity) * w);
}

double min_real_decay(const Matrix& a) {
  const ComplexVector ev = eigenvalues(a);
  double s = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) s = std::min(s, std::abs(ev(i).real()));
  return s;
}

SwitchSpeeds speeds_at(const StateSpace& ss, const Vector& x, int incoming_sign) {
  const double ax = ss.c.dot(ss.a * x);
  const double cb = ss.c.dot(ss.b);
  const double s = static_cast<double>(incoming_sign);
  return SwitchSpeeds{ax - s * cb, ax + s * cb};
}

double nearest_to_one(const std::vector<Complex>& mu) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& m : mu) best = std::min(best, std::abs(m - 1.0));
  return best;
}

void fill_spectrum(MonodromyReport& r) {
  const ComplexVector ev = eigenvalues(r.matrix);
  r.floquet_multipliers.assign(ev.data(), ev.data() + ev.size());
  sort_complex(r.floquet_multipliers);
  r.det = r.matrix.determinant();
  r.trivial_multiplier_error = nearest_to_one(r.floquet_multipliers);
}

double exact_limit_det(double a_last, double period, const std::vector<SwitchSpeeds>& speeds) {
  double d = std::exp(-a_last * period);
  for (const SwitchSpeeds& s : speeds) d *= s.rho_plus / s.rho_minus;
  return d;
}

}  // namespace

double half_period_function(const StateSpace& ss, double tau) {
  const Vector w = equilibrium_offset(ss);
  return ss.c.dot(anchor_for(ss, w, tau));
}

OrbitSearch find_symmetric_orbits(const RelaySystem& system, const OrbitSearchOptions& options) {
  const StateSpace& ss = system.state_space();
  const Vector w = equilibrium_offset(ss);
  const double cw = ss.c.dot(w);
  const double sigma = min_real_decay(ss.a);

  double tau_min = 0.0;
  if (options.tau_min) {
    tau_min = *options.tau_min;
  } else {
    tau_min = 1e-3 / std::max(1.0, norm2(ss.a));
    if (ss.leading_num() != 0.0 && spectral_abscissa(ss.a) < 0.0) {
      const BoundsReport br = bounds_report(ss, decay_envelope(ss.a));
      tau_min = *br.t_min_inter_switch;
    }
  }
  double tau_max = options.tau_max ? *options.tau_max : 100.0 / std::max(sigma, 1e-12);
  if (!(tau_min > 0.0) || !(tau_max > tau_min) || options.grid_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "orbit search: invalid tau range or grid");
  }

  const auto g = [&](double tau) { return ss.c.dot(anchor_for(ss, w, tau)); };
  const int m = options.grid_points;
  const double ratio = std::log(tau_max / tau_min) / (m - 1);

  OrbitSearch out;
  double t_prev = tau_min;
  double g_prev = g(t_prev);
  for (int i = 1; i < m; ++i) {
    const double t = tau_min * std::exp(ratio * i);
    const double gt = g(t);
    if (g_prev * gt < 0.0 || gt == 0.0) {
      RootOptions ro;
      ro.x_tol_rel = 1e-14;
      const double tau = refine_root(g, RootBracket{t_prev, t, g_prev, gt}, ro);

      OrbitCandidate c;
      c.half_period = tau;
      c.period = 2.0 * tau;
      c.anchor = anchor_for(ss, w, tau);
      c.anchor(ss.order() - 1) = 0.0;

      // Output sign condition over [0, tau] and the peak output.
      const int pts = std::max(2, options.sign_check_points);
      const double dt = tau / (pts - 1);
      const Matrix step = expm(ss.a, dt);
      Vector z = c.anchor - w;
      double min_y = std::numeric_limits<double>::infinity();
      double peak = 0.0;
      for (int j = 0; j < pts; ++j) {
        const double y = ss.c.dot(z) + cw;
        if (j > 0 && j < pts - 1) min_y = std::min(min_y, y);
        peak = std::max(peak, std::abs(y));
        z = step * z;
      }
      c.min_sign_margin = min_y;
      c.peak_output = peak;
      c.switch_speeds = {speeds_at(ss, -c.anchor, 1), speeds_at(ss, c.anchor, -1)};
      c.is_symmetric_unimodal = min_y >= -1e-9;
      out.candidates.push_back(std::move(c));
    }
    t_prev = t;
    g_prev = gt;
  }
  for (const OrbitCandidate& c : out.candidates) {
    if (c.is_symmetric_unimodal) {
      out.best = c;
      break;
    }
  }
  return out;
}

OrbitCandidate find_symmetric_orbit(const RelaySystem& system, const OrbitSearchOptions& options) {
  OrbitSearch s = find_symmetric_orbits(system, options);
  if (!s.best) {
    throw Error(ErrorCode::kNoOrbit,
                "no symmetric unimodal candidate (" + std::to_string(s.candidates.size()) +
                    " roots of the half-period equation failed the sign condition)");
  }
  return *s.best;
}

Matrix switch_jump(const StateSpace& ss, const SwitchSpeeds& speeds, int incoming_sign,
                   JumpModel model) {
  const Eigen::Index n = ss.order();
  if (std::abs(speeds.rho_minus) <= 1e-8 || std::abs(speeds.rho_plus) <= 1e-8) {
    throw Error(ErrorCode::kDegenerateSpeed, "output speed degenerate at switch");
  }
  const Matrix bc = ss.b * ss.c;
  const Matrix identity = Matrix::Identity(n, n);
  if (model == JumpModel::kSaltation) {
    return identity + 2.0 * static_cast<double>(incoming_sign) * bc / speeds.rho_minus;
  }
  const double kappa = 1.0 / std::abs(speeds.rho_minus) + 1.0 / std::abs(speeds.rho_plus);
  const double b = ss.leading_num();
  const double factor = b != 0.0 ? -std::expm1(-b * kappa) / b : kappa;
  return identity - bc * factor;
}

double det_limit_formula(double a_last, double b_last, double period,
                         const std::vector<SwitchSpeeds>& speeds) {
  double sum = 0.0;
  for (const SwitchSpeeds& s : speeds) {
    sum += (std::abs(s.rho_minus) + std::abs(s.rho_plus)) /
           std::abs(s.rho_minus * s.rho_plus);
  }
  return std::exp(-a_last * period - b_last * sum);
}

MonodromyReport monodromy_exact(const OrbitCandidate& orbit, const StateSpace& ss,
                                JumpModel model) {
  if (!orbit.is_symmetric_unimodal || orbit.switch_speeds.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "monodromy_exact: orbit candidate is not valid");
  }
  const Matrix e = expm(ss.a, orbit.half_period);
  const Matrix j1 = switch_jump(ss, orbit.switch_speeds[0], 1, model);
  const Matrix j2 = switch_jump(ss, orbit.switch_speeds[1], -1, model);
  MonodromyReport r;
  r.matrix = j2 * e * j1 * e;
  fill_spectrum(r);
  const double a_last = -ss.a(ss.order() - 1, ss.order() - 1);
  r.det_limit_formula = det_limit_formula(a_last, ss.leading_num(), orbit.period,
                                          orbit.switch_speeds);
  r.det_exact_limit = exact_limit_det(a_last, orbit.period, orbit.switch_speeds);
  return r;
}

MonodromyReport monodromy_sinusoid(const OrbitCandidate& orbit, const StateSpace& ss) {
  if (!(orbit.peak_output > 0.0)) {
    throw Error(ErrorCode::kDegenerateSpeed, "monodromy_sinusoid: zero peak output");
  }
  const Eigen::Index n = ss.order();
  const Matrix half = (Matrix::Identity(n, n) -
                       ss.b * ss.c * (orbit.period / (std::numbers::pi * orbit.peak_output))) *
                      expm(ss.a, orbit.period / 2.0);
  MonodromyReport r;
  r.matrix = half * half;
  fill_spectrum(r);
  const double a_last = -ss.a(n - 1, n - 1);
  r.det_limit_formula = det_limit_formula(a_last, ss.leading_num(), orbit.period,
                                          orbit.switch_speeds);
  r.det_exact_limit = exact_limit_det(a_last, orbit.period, orbit.switch_speeds);
  return r;
}

namespace {

double sech2(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

struct ReturnMap {
  Vector image;
  Matrix phi;
  double period = 0.0;
  double trace_integral = 0.0;  // int gamma sech^2(gamma C z) dt
};

// Integrates [z, Phi, q] from z0 (C z0 = 0, output rising) to the next upward
// crossing of C z = 0.
ReturnMap return_map(const StateSpace& ss, double gamma, const Vector& z0, double t_guess,
                     const OdeOptions& ode) {
  const Eigen::Index n = ss.order();
  const Eigen::Index dim = n + n * n + 1;
  const Matrix bc = ss.b * ss.c;
  const auto rhs = [&](double, const Vector& y, Vector& dy) {
    const Vector z = y.head(n);
    const double out = ss.c.dot(z);
    const double s2 = gamma * sech2(gamma * out);
    dy.head(n) = ss.a * z - ss.b * std::tanh(gamma * out);
    const Eigen::Map<const Matrix> phi(y.data() + n, n, n);
    Eigen::Map<Matrix> dphi(dy.data() + n, n, n);
    dphi = (ss.a - s2 * bc) * phi;
    dy(dim - 1) = s2;
  };
  Vector y0 = Vector::Zero(dim);
  y0.head(n) = z0;
  Eigen::Map<Matrix>(y0.data() + n, n, n) = Matrix::Identity(n, n);

  int phase = 0;  // 0: waiting for the output to go negative, 1: for it to return
  bool found = false;
  ReturnMap out;
  const auto observer = [&](const StepView& sv) {
    const double out_now = ss.c.dot(sv.x.head(n));
    if (phase == 0) {
      if (out_now < 0.0) phase = 1;
      return false;
    }
    if (out_now < 0.0) return false;
    const auto f = [&](double t) { return ss.c.dot(sv.state_at(t).head(n)); };
    const double f_lo = f(sv.t_prev);
    RootOptions ro;
    ro.x_tol_rel = 1e-14;
    const double tc = (f_lo < 0.0) ? refine_root(f, RootBracket{sv.t_prev, sv.t, f_lo, out_now}, ro)
                                   : sv.t_prev;
    const Vector y = sv.state_at(tc);
    out.image = y.head(n);
    out.phi = Eigen::Map<const Matrix>(y.data() + n, n, n);
    out.trace_integral = y(dim - 1);
    out.period = tc;
    found = true;
    return true;
  };
  integrate_adaptive(rhs, y0, 0.0, 3.0 * t_guess, ode, observer);
  if (!found) {
    throw Error(ErrorCode::kShootingDiverged,
                "shooting: no return to the section within 3 periods of the guess");
  }
  return out;
}

}  // namespace

FloquetReport monodromy_floquet(const StateSpace& ss, double gamma,
                                const OrbitCandidate& orbit_hint, const FloquetOptions& options) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  const Eigen::Index n = ss.order();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "Floquet shooting needs order >= 2");

  std::vector<double> schedule;
  for (double g = options.continuation_start; g < gamma; g *= 10.0) schedule.push_back(g);
  schedule.push_back(gamma);

  Vector z = orbit_hint.anchor;
  z(n - 1) = 0.0;
  double period = orbit_hint.period;
  const double a_last = -ss.a(n - 1, n - 1);
  const double b_last = ss.leading_num();
  FloquetReport rep;
  for (double g : schedule) {
    ReturnMap rm;
    double res = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter <= options.max_newton; ++iter) {
      rm = return_map(ss, g, z, period, options.ode);
      const Vector f = (rm.image - z).head(n - 1);
      res = f.norm();
      if (res < options.shooting_tol * std::max(1.0, z.norm())) break;
      if (iter == options.max_newton) break;
      Vector field(n);
      field = ss.a * rm.image - ss.b * std::tanh(g * ss.c.dot(rm.image));
      const double cf = ss.c.dot(field);
      const Matrix dp = (Matrix::Identity(n, n) - field * ss.c / cf) * rm.phi;
      const Matrix jac = dp.topLeftCorner(n - 1, n - 1) - Matrix::Identity(n - 1, n - 1);
      const Vector delta = -jac.colPivHouseholderQr().solve(f);
      z.head(n - 1) += delta;
      period = rm.period;
      if (!z.allFinite()) break;
    }
    if (!(res < options.shooting_tol * std::max(1.0, z.norm()))) {
      throw Error(ErrorCode::kShootingDiverged,
                  "shooting did not converge at gamma = " + std::to_string(g) +
                      " (residual " + std::to_string(res) + ")");
    }
    period = rm.period;
    rep.shooting_iterations += iter;
    rep.monodromy.matrix = rm.phi;
    rep.closure_error = (rm.image - z).norm();
    rep.liouville_det = std::exp(-a_last * rm.period - b_last * rm.trace_integral);
  }
  rep.gamma = gamma;
  rep.anchor = z;
  rep.period = period;
  fill_spectrum(rep.monodromy);
  rep.monodromy.det_limit_formula =
      det_limit_formula(a_last, b_last, orbit_hint.period, orbit_hint.switch_speeds);
  rep.monodromy.det_exact_limit =
      exact_limit_det(a_last, orbit_hint.period, orbit_hint.switch_speeds);
  return rep;
}

std::vector<OrbitSample> orbit_samples(const OrbitCandidate& orbit, const RelaySystem& system,
                                       int points_per_half) {
  const int p = std::max(1, points_per_half);
  const double dt = orbit.half_period / p;
  std::vector<OrbitSample> out;
  out.reserve(static_cast<std::size_t>(2 * p + 1));
  for (int half = 0; half < 2; ++half) {
    const int sign = half == 0 ? 1 : -1;
    const Vector start = half == 0 ? orbit.anchor : Vector(-orbit.anchor);
    for (int j = 0; j < p; ++j) {
      const double t = j * dt;
      const Vector x = j == 0 ? start : system.propagate(start, sign, t);
      out.push_back(OrbitSample{half * orbit.half_period + t, x, sign, system.output(x)});
    }
  }
  out.push_back(OrbitSample{orbit.period, orbit.anchor, 1, 0.0});
  return out;
}

}  // namespace relay_osc
