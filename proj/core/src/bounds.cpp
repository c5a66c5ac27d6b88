#include "relay_osc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/random.hpp"

namespace relay_osc {

namespace {

// max over j of ||e^{A t_j}||_2 e^{sigma t_j} on t_j = j * horizon / (points - 1),
// plus the ratio values of the last tenth of the grid.
struct GridScan {
  double max_ratio = 0.0;
  bool still_growing = false;
};

GridScan scan_ratio(const Matrix& a, double sigma, double horizon, int points) {
  const double dt = horizon / (points - 1);
  const Matrix step = expm(a, dt);
  Matrix e = Matrix::Identity(a.rows(), a.cols());
  GridScan out;
  double tail_max = 0.0;
  double last = 0.0;
  const int tail_start = points - points / 10;
  for (int j = 0; j < points; ++j) {
    const double t = j * dt;
    const double r = norm2(e) * std::exp(sigma * t);
    out.max_ratio = std::max(out.max_ratio, r);
    if (j >= tail_start) tail_max = std::max(tail_max, r);
    last = r;
    e = e * step;
  }
  out.still_growing = last >= tail_max && last >= 0.999 * out.max_ratio;
  return out;
}

}  // namespace

bool SetD::contains(const Vector& x, double tol) const {
  if (x.size() != order || order < 2) return false;
  const double scale = 1.0 + x.norm();
  if (std::abs(x(order - 1)) > tol * scale) return false;
  if (x.norm() > radius * (1.0 + tol)) return false;
  return x(order - 2) >= strip_halfwidth - tol * scale;
}

DecayEnvelope decay_envelope(const Matrix& a, double epsilon) {
  const ComplexVector ev = eigenvalues(a);
  double smin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i).real() < 0.0)) {
      throw Error(ErrorCode::kNotHurwitz, "decay envelope: A is not Hurwitz");
    }
    smin = std::min(smin, -ev(i).real());
  }
  DecayEnvelope env;
  env.epsilon_margin = epsilon > 0.0 ? epsilon : 1e-3 * smin;
  if (env.epsilon_margin >= smin) {
    throw Error(ErrorCode::kInvalidArgument,
                "decay envelope: epsilon must be smaller than min |Re lambda|");
  }
  env.sigma_slowest = smin - env.epsilon_margin;
  const double sigma = env.sigma_slowest;

  // Extend the search horizon while the ratio is still rising at its end
  // (defective slow modes peak late).
  double horizon = 40.0 / sigma;
  GridScan scan = scan_ratio(a, sigma, horizon, 4000);
  while (scan.still_growing && horizon < 1e5 / sigma) {
    horizon *= 4.0;
    scan = scan_ratio(a, sigma, horizon, 4000);
  }
  env.m_initial = std::max(1.0, 1.05 * scan.max_ratio);

  const GridScan check = scan_ratio(a, sigma, 20.0 / sigma, 8001);
  env.verified_max_ratio = check.max_ratio / env.m_initial;
  if (env.verified_max_ratio > 1.0) {
    const EigenDecomposition e = eigen_decompose(a);
    if (e.is_diagonalizable) {
      env.m_initial = std::max(env.m_initial, bauer_fike(e));
      env.used_eigenvector_fallback = true;
      env.verified_max_ratio = check.max_ratio / env.m_initial;
    }
  }
  return env;
}

BoundsReport bounds_report(const StateSpace& ss, const DecayEnvelope& env) {
  BoundsReport r;
  const double m = env.m_initial;
  const double sigma = env.sigma_slowest;
  r.norm_a = norm2(ss.a);
  r.norm_b = ss.b.norm();
  r.m_loose = 2.0 * m * r.norm_b / sigma;
  r.ball_radius = r.m_loose;
  r.t_excursions_over = std::log(2.0 * m) / sigma;
  r.m_excursion = m * (2.0 * m + 1.0) * r.norm_b / sigma;
  const double b_last = ss.leading_num();
  if (b_last != 0.0) {
    const double t_min = 2.0 * std::abs(b_last) / (r.norm_a * r.m_excursion + r.norm_b);
    r.t_min_inter_switch = t_min;
    r.k_iterations = static_cast<long long>(std::ceil(r.t_excursions_over / t_min));
  } else {
    r.explanation =
        "leading numerator coefficient is zero: the minimum inter-switch time and the "
        "iteration count are undefined";
  }
  return r;
}

SetD make_set_d(const StateSpace& ss, const BoundsReport& report) {
  return SetD{report.m_loose, std::abs(ss.leading_num()), ss.order()};
}

std::vector<Vector> sample_D(const SetD& d, std::size_t count, std::uint64_t seed,
                             std::size_t* attempts_out) {
  if (d.order < 2) throw Error(ErrorCode::kEmptySet, "set D needs plant order >= 2");
  if (d.strip_halfwidth >= d.radius) {
    throw Error(ErrorCode::kEmptySet, "set D is empty: strip half-width >= radius");
  }
  const int dim = d.order - 1;
  CounterRng rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  const std::size_t max_attempts = std::max<std::size_t>(count, 1) * 10'000'000ULL;
  std::size_t attempts = 0;
  Vector y(dim);
  while (out.size() < count) {
    if (++attempts > max_attempts) {
      throw Error(ErrorCode::kEmptySet, "set D is too thin to sample by rejection");
    }
    if (dim <= 5) {
      for (int i = 0; i < dim; ++i) y(i) = rng.uniform(-d.radius, d.radius);
      if (y.norm() > d.radius) continue;
    } else {
      for (int i = 0; i < dim; ++i) y(i) = rng.normal();
      const double r = d.radius * std::pow(rng.uniform(), 1.0 / dim);
      y *= r / y.norm();
    }
    if (y(dim - 1) < d.strip_halfwidth) continue;
    Vector x = Vector::Zero(d.order);
    x.head(dim) = y;
    out.push_back(std::move(x));
  }
  if (attempts_out) *attempts_out = attempts;
  return out;
}

double state_magnitude_bound(const DecayEnvelope& env, double norm_b, double norm_x0,
                             double t) {
  const double decay = std::exp(-env.sigma_slowest * t);
  return env.m_initial * decay * norm_x0 +
         env.m_initial * (1.0 - decay) / env.sigma_slowest * norm_b;
}

}  // namespace relay_osc
