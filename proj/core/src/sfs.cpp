#include "relay_osc/sfs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/roots.hpp"

namespace relay_osc {

void sfs_field(const StateSpace& ss, double gamma, const Vector& z, Vector& dz) {
  dz = ss.a * z - ss.b * std::tanh(gamma * ss.c.dot(z));
}

DenseTrajectory simulate_sfs(const StateSpace& ss, const SfsConfig& cfg, const Vector& x0,
                             double t_end) {
  if (!(cfg.gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  const auto rhs = [&](double, const Vector& z, Vector& dz) { sfs_field(ss, cfg.gamma, z, dz); };
  return integrate_adaptive(rhs, x0, 0.0, t_end, cfg.ode);
}

Matrix linearization(const StateSpace& ss, double gamma) { return ss.a - gamma * ss.b * ss.c; }

std::vector<double> closed_loop_polynomial(const StateSpace& ss, double gamma) {
  const int n = ss.order();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 1.0);
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = -ss.a(i, n - 1) + gamma * ss.b(i);
  return c;
}

namespace {

int unstable_count(const StateSpace& ss, double gamma) {
  const ComplexVector ev = eigenvalues(linearization(ss, gamma));
  int count = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) count += ev(i).real() > 0.0 ? 1 : 0;
  return count;
}

std::vector<Complex> continue_track(const std::vector<Complex>& prev, ComplexVector next) {
  std::vector<Complex> out(prev.size());
  std::vector<char> used(static_cast<std::size_t>(next.size()), 0);
  for (std::size_t i = 0; i < prev.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index j = 0; j < next.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double d = std::abs(next(j) - prev[i]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    used[static_cast<std::size_t>(arg)] = 1;
    out[i] = next(arg);
  }
  return out;
}

}  // namespace

RootLocusScan root_locus(const StateSpace& ss, double gamma_max, int points, double gamma_min) {
  if (points < 10) throw Error(ErrorCode::kInvalidArgument, "root_locus needs at least 10 points");
  if (!(gamma_max > gamma_min) || !(gamma_min > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "root_locus: invalid gamma range");
  }
  RootLocusScan scan;
  const double ratio = std::log(gamma_max / gamma_min) / (points - 1);
  std::vector<int> counts;
  for (int i = 0; i < points; ++i) {
    const double g = i == points - 1 ? gamma_max : gamma_min * std::exp(ratio * i);
    scan.gamma_grid.push_back(g);
    const ComplexVector ev = eigenvalues(linearization(ss, g));
    if (scan.eigen_tracks.empty()) {
      std::vector<Complex> first(ev.data(), ev.data() + ev.size());
      sort_complex(first);
      scan.eigen_tracks.push_back(std::move(first));
    } else {
      scan.eigen_tracks.push_back(continue_track(scan.eigen_tracks.back(), ev));
    }
    counts.push_back(unstable_count(ss, g));
  }

  for (int i = 1; i < points; ++i) {
    if (counts[static_cast<std::size_t>(i)] == counts[static_cast<std::size_t>(i) - 1]) continue;
    double lo = scan.gamma_grid[static_cast<std::size_t>(i) - 1];
    double hi = scan.gamma_grid[static_cast<std::size_t>(i)];
    const int c_lo = counts[static_cast<std::size_t>(i) - 1];
    const int c_hi = counts[static_cast<std::size_t>(i)];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (unstable_count(ss, mid) == c_lo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    Crossing c;
    c.gamma0 = 0.5 * (lo + hi);
    const ComplexVector ev = eigenvalues(linearization(ss, c.gamma0));
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < ev.size(); ++j) {
      if (std::abs(ev(j).real()) < std::abs(ev(arg).real())) arg = j;
    }
    c.omega0 = std::abs(ev(arg).imag());
    c.kind = c.omega0 > 1e-6 ? CrossingKind::kHopf : CrossingKind::kPitchfork;
    c.direction = c_hi > c_lo ? 1 : -1;
    const int change = std::abs(c_hi - c_lo);
    c.odd_multiplicity = ((c.kind == CrossingKind::kHopf ? change / 2 : change) % 2) == 1;
    scan.crossings.push_back(c);
  }
  return scan;
}

namespace {

struct Window {
  double amplitude = 0.0;  // max |y|
  double swing = 0.0;      // max y - min y
  double mean = 0.0;
};

Window measure(const DenseTrajectory& traj, const StateSpace& ss, double t_from) {
  Window w;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < traj.sample_times.size(); ++i) {
    if (traj.sample_times[i] < t_from) continue;
    const double y = ss.c.dot(traj.samples[i]);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
    w.amplitude = std::max(w.amplitude, std::abs(y));
    sum += y;
    ++count;
  }
  w.swing = hi - lo;
  w.mean = count ? sum / count : 0.0;
  return w;
}

}  // namespace

HopfReport hopf_classify(const StateSpace& ss, const RootLocusScan& scan,
                         const HopfOptions& options) {
  HopfReport rep;
  const Crossing* first = nullptr;
  for (const Crossing& c : scan.crossings) {
    if (c.kind == CrossingKind::kPitchfork) {
      rep.pitchfork_gammas.push_back(c.gamma0);
    } else if (!first) {
      first = &c;
    }
  }
  if (!first) throw Error(ErrorCode::kNoOscillatoryCrossing, "no oscillatory crossing in scan");
  rep.gamma0 = first->gamma0;
  rep.omega0 = first->omega0;

  const int n = ss.order();
  const double period = 2.0 * std::numbers::pi / rep.omega0;
  const Vector x0 = Vector::Constant(n, options.initial_norm / std::sqrt(static_cast<double>(n)));
  const double t_settle = options.settle_periods * period;
  const double t_end = t_settle + options.measure_periods * period;

  int oscillating = 0;
  int decayed = 0;
  int other = 0;
  for (double delta : {0.02, 0.05, 0.1}) {
    HopfEvidence ev;
    ev.delta = delta;
    ev.gamma = rep.gamma0 * (1.0 + delta);
    SfsConfig cfg{ev.gamma, options.ode};
    cfg.ode.sample_dt = period / 200.0;
    cfg.ode.max_step = period / 20.0;
    const DenseTrajectory traj = simulate_sfs(ss, cfg, x0, t_end);
    const Window w = measure(traj, ss, t_settle);
    ev.amplitude = w.amplitude;
    if (w.amplitude < 1e-2 * options.initial_norm) {
      ev.outcome = "decay";
      ++decayed;
    } else if (w.swing < 1e-3 * w.amplitude) {
      ev.outcome = "equilibrium";
      ++other;
    } else if (w.amplitude > 1e3) {
      ev.outcome = "escape";
      ++other;
    } else {
      ev.outcome = "oscillation";
      ++oscillating;
    }
    rep.evidence.push_back(ev);
  }
  if (oscillating == 3) {
    const double growth = rep.evidence[2].amplitude / rep.evidence[0].amplitude;
    rep.kind = growth >= 1.5 ? HopfKind::kSupercritical : HopfKind::kSubcritical;
  } else if (other > 0 && decayed == 0) {
    rep.kind = HopfKind::kSubcritical;
  } else {
    rep.kind = HopfKind::kUndetermined;
  }
  return rep;
}

DescribingLocus describing_locus(const StateSpace& ss, double omega, double gamma,
                                 double theta_max, int points) {
  if (!(omega > 0.0)) throw Error(ErrorCode::kInvalidArgument, "omega must be positive");
  if (points < 2) throw Error(ErrorCode::kInvalidArgument, "describing locus needs 2 points");
  const Complex s(0.0, omega);
  const ComplexVector poles = eigenvalues(ss.a);
  for (Eigen::Index i = 0; i < poles.size(); ++i) {
    if (std::abs(poles(i) - s) < 1e-10 * (1.0 + omega)) {
      throw Error(ErrorCode::kPoleOnAxis,
                  "G(j omega) has a pole on the imaginary axis at omega = " + std::to_string(omega));
    }
  }
  DescribingLocus d;
  d.omega = omega;
  d.gamma = gamma;
  const Complex g = ss.transfer(s);
  for (int i = 0; i < points; ++i) {
    const double theta = theta_max * i / (points - 1);
    d.theta_grid.push_back(theta);
    d.l_values.push_back(-1.0 + theta * theta * gamma * gamma / 4.0 * g);
  }
  d.direction = gamma * gamma * g / 4.0;
  d.nyquist_tangent = gamma * Complex(0.0, 1.0) * ss.transfer_derivative(s);
  const double denom = std::abs(d.direction) * std::abs(d.nyquist_tangent);
  d.sin_angle = denom > 0.0 ? std::imag(std::conj(d.direction) * d.nyquist_tangent) / denom : 0.0;
  d.tangential = std::abs(d.sin_angle) < 1e-3;
  return d;
}

HyperbolicityResult hyperbolicity_check(const StateSpace& ss, double gamma_max, int samples) {
  HyperbolicityResult res;
  const auto margin = [&](double k) { return -spectral_abscissa(linearization(ss, k)); };
  const int m = std::max(samples, 2);
  const double h = gamma_max / (m - 1);

  // Coarse scan for a non-Hurwitz point; the first one is refined to the boundary.
  double prev_k = 0.0;
  double prev_margin = margin(0.0);
  res.min_margin = prev_margin;
  res.grid_points = 1;
  if (prev_margin <= 0.0) {
    res.witness = 0.0;
    return res;
  }
  for (int i = 1; i < m; ++i) {
    const double k = i == m - 1 ? gamma_max : i * h;
    const double mk = margin(k);
    ++res.grid_points;
    res.min_margin = std::min(res.min_margin, mk);
    if (mk <= 0.0) {
      double lo = prev_k;
      double hi = k;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) > 0.0 ? lo : hi) = mid;
      }
      res.witness = hi;
      res.hyperbolic = false;
      return res;
    }
    prev_k = k;
    prev_margin = mk;
  }

  // Certify each interval: eigenvalues over [k - r, k + r] stay within
  // kappa_2(V) r ||B|| ||C|| of those at k (Bauer-Fike).
  const double bc = ss.b.norm() * ss.c.norm();
  struct Interval {
    double lo;
    double hi;
    int depth;
  };
  std::vector<Interval> stack;
  for (int i = m - 2; i >= 0; --i) {
    stack.push_back({i * h, i == m - 2 ? gamma_max : (i + 1) * h, 0});
  }
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double radius = 0.5 * (iv.hi - iv.lo);
    const Matrix lin = linearization(ss, mid);
    const EigenDecomposition e = eigen_decompose(lin);
    const double mk = -e.eigenvalues.real().maxCoeff();
    ++res.grid_points;
    res.min_margin = std::min(res.min_margin, mk);
    if (mk <= 0.0) {
      res.witness = mid;
      res.hyperbolic = false;
      return res;
    }
    const double kappa = eigenvector_condition(e);
    if (std::isfinite(kappa) && kappa * radius * bc < mk) continue;
    if (iv.depth >= 60) {
      res.hyperbolic = false;
      return res;
    }
    stack.push_back({mid, iv.hi, iv.depth + 1});
    stack.push_back({iv.lo, mid, iv.depth + 1});
  }
  res.hyperbolic = true;
  return res;
}

EnvelopeConstant sech2_envelope_constant() {
  // d/dz [z sech^2 z] = sech^2 z (1 - 2 z tanh z)
  const auto f = [](double z) { return 1.0 - 2.0 * z * std::tanh(z); };
  RootOptions ro;
  ro.x_tol_rel = 1e-15;
  const double z = refine_root(f, RootBracket{0.1, 2.0, f(0.1), f(2.0)}, ro);
  const double c = std::cosh(z);
  return EnvelopeConstant{z, z / (c * c)};
}

}  // namespace relay_osc
