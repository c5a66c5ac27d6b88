#include "relay_osc/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"

namespace relay_osc {

Matrix astrom_jacobian(const Matrix& e_at, const Vector& u, const RowVector& c) {
  const Eigen::Index n = e_at.rows();
  return (Matrix::Identity(n, n) - u * c / c.dot(u)) * e_at;
}

Matrix exact_jacobian(const Matrix& astrom, const Vector& v) {
  const Eigen::Index n = astrom.rows();
  const double vv = v.squaredNorm();
  if (vv == 0.0) return astrom;
  return astrom * (Matrix::Identity(n, n) - v * v.transpose() / vv);
}

JacobianPair jacobians(const RelaySystem& system, const Vector& x) {
  if (!system.on_plane(x)) {
    throw Error(ErrorCode::kInvalidArgument, "jacobians: point is not on the switching plane");
  }
  const StateSpace& ss = system.state_space();
  const ExitResult r = system.exit(x, 1);
  JacobianPair jp;
  jp.tau = r.tau;
  jp.image = r.x;
  jp.u = system.field(r.x, 1);
  jp.v = system.field(x, 1);
  const double cu = ss.c.dot(jp.u);
  if (std::abs(cu) < 1e-8) {
    throw Error(ErrorCode::kNonTransversal, "non-transversal point: |C u| < 1e-8");
  }
  jp.astrom = astrom_jacobian(expm(ss.a, r.tau), jp.u, ss.c);
  jp.exact = exact_jacobian(jp.astrom, jp.v);
  return jp;
}

ChainedJacobian chained_jacobians(const RelaySystem& system, const Vector& x, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  ChainedJacobian out;
  Vector start = x;
  for (int i = 0; i < k; ++i) {
    JacobianPair jp = jacobians(system, start);
    if (i == 0) {
      out.astrom = jp.astrom;
      out.exact = jp.exact;
    } else {
      out.astrom = -jp.astrom * out.astrom;
      out.exact = -jp.exact * out.exact;
    }
    start = -jp.image;
    out.image = jp.image;
    out.factors.push_back(std::move(jp));
  }
  return out;
}

double SpectralSurvey::schur_stable_fraction() const {
  if (samples.empty()) return 0.0;
  const auto stable = std::count_if(samples.begin(), samples.end(),
                                    [](const SpectralSample& s) { return s.schur_stable; });
  return static_cast<double>(stable) / static_cast<double>(samples.size());
}

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RELAY_OSC_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

}  // namespace

SpectralSurvey spectral_survey(const RelaySystem& system, const SetD& d, std::size_t count,
                               int k, std::uint64_t seed, const SurveyOptions& options) {
  const std::vector<Vector> points = sample_D(d, count, seed);
  std::vector<SpectralSample> slots(points.size());
  std::vector<char> ok(points.size(), 0);

  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        const ChainedJacobian cj = chained_jacobians(system, points[i], k);
        SpectralSample& s = slots[i];
        s.point_id = i;
        s.point = points[i];
        s.rho_astrom = spectral_radius(cj.astrom);
        s.rho_exact = spectral_radius(cj.exact);
        s.norm_astrom = norm2(cj.astrom);
        s.norm_exact = norm2(cj.exact);
        s.bauer_fike_astrom = eigenvector_condition(eigen_decompose(cj.astrom));
        s.bauer_fike_exact = eigenvector_condition(eigen_decompose(cj.exact));
        s.schur_stable = s.rho_exact < 1.0;
        ok[i] = 1;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNonTransversal && e.code() != ErrorCode::kQuiescent) throw;
      }
    }
  };

  const unsigned threads =
      std::min<unsigned>(resolve_threads(options.threads),
                         static_cast<unsigned>(std::max<std::size_t>(1, points.size())));
  if (threads <= 1) {
    work(0, points.size());
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (points.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(points.size(), begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SpectralSurvey survey;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (ok[i]) {
      survey.samples.push_back(std::move(slots[i]));
    } else {
      ++survey.skipped;
    }
  }
  return survey;
}

FixedPointResult fixed_point_search(const RelaySystem& system, const SetD& d, int k,
                                    const Vector& x0, const FixedPointOptions& options) {
  if (!d.contains(x0, 1e-9)) {
    throw Error(ErrorCode::kInvalidArgument, "fixed_point_search: start point is not in D");
  }
  const auto image = [&](const Vector& x) { return Vector(-system.kth_exit_map(x, k).image); };
  const auto check_inside = [&](const Vector& x, int iter) {
    if (!d.contains(x, 1e-8)) {
      throw Error(ErrorCode::kEscapedSet,
                  "iterate " + std::to_string(iter) + " left D (norm " +
                      std::to_string(x.norm()) + ")");
    }
  };

  FixedPointResult res;
  res.k = k;
  Vector x = x0;
  Vector gx = image(x);
  double r = (x - gx).norm();
  res.residual_history.push_back(r);
  bool newton = options.newton_only;
  int stalled = 0;
  const Eigen::Index n = x.size();

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    if (r < options.tol * std::max(1.0, x.norm())) {
      res.converged = true;
      break;
    }
    res.iterations_used = iter;
    if (!newton) {
      const Vector x_next = gx;
      check_inside(x_next, iter);
      const Vector g_next = image(x_next);
      const double r_next = (x_next - g_next).norm();
      stalled = (r_next > options.stall_ratio * r) ? stalled + 1 : 0;
      x = x_next;
      gx = g_next;
      r = r_next;
      res.residual_history.push_back(r);
      if (stalled >= options.stall_patience) newton = true;
      continue;
    }
    // Damped Newton on F(x) = x + psi_+(x;k) with DF = I + J_chain.
    res.used_newton = true;
    const ChainedJacobian cj = chained_jacobians(system, x, k);
    const Vector f = x + cj.image;
    const Matrix df = Matrix::Identity(n, n) + cj.exact;
    const Vector step = -df.colPivHouseholderQr().solve(f);
    double lambda = 1.0;
    bool accepted = false;
    Vector x_try;
    Vector g_try;
    double r_try = 0.0;
    while (lambda >= std::ldexp(1.0, -20)) {
      x_try = x + lambda * step;
      x_try(n - 1) = 0.0;
      try {
        g_try = image(x_try);
        r_try = (x_try - g_try).norm();
        if (r_try < r) {
          accepted = true;
          break;
        }
      } catch (const Error&) {
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    check_inside(x_try, iter);
    x = x_try;
    gx = g_try;
    r = r_try;
    res.residual_history.push_back(r);
  }
  if (!res.converged && r < options.tol * std::max(1.0, x.norm())) res.converged = true;
  res.x_hat = x;
  res.residual = r;
  if (res.converged && !d.contains(x, 1e-8)) res.converged = false;
  return res;
}

}  // namespace relay_osc
