#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/ode.hpp"
#include "relay_osc/random.hpp"
#include "relay_osc/roots.hpp"

using namespace relay_osc;

TEST_CASE("expm trivial cases") {
  const Matrix z = Matrix::Zero(3, 3);
  CHECK(expm(z, 7.0).isApprox(Matrix::Identity(3, 3)));
  Matrix m(1, 1);
  m << -1.0;
  CHECK(expm(m, std::log(2.0))(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("expm matches the eigendecomposition of the second-order companion") {
  Matrix a(2, 2);
  a << 0, -6, 1, -5;
  // Eigenvectors [-6, lambda] for lambda = -2, -3.
  Matrix v(2, 2);
  v << -6, -6, -2, -3;
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = std::exp(-2.0);
  d(1, 1) = std::exp(-3.0);
  const Matrix oracle = v * d * v.inverse();
  const Matrix e = expm(a, 1.0);
  CHECK((e - oracle).norm() <= 1e-12 * oracle.norm());
}

TEST_CASE("expm relative accuracy on random diagonalizable matrices") {
  CounterRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    Matrix v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = rng.uniform(-1, 1);
    v += 2.0 * Matrix::Identity(n, n);
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam(i) = rng.uniform(-3, 1);
    const Matrix m = v * lam.asDiagonal() * v.inverse();
    const double t = 10.0 / std::max(1.0, m.lpNorm<1>()) * rng.uniform(0.1, 1.0);
    const Matrix oracle = v * (lam * t).array().exp().matrix().asDiagonal() * v.inverse();
    CHECK((expm(m, t) - oracle).norm() <= 1e-12 * oracle.norm() * 10);
  }
}

TEST_CASE("expm semigroup property") {
  CounterRng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1, 1);
    m -= (spectral_abscissa(m) + 0.5) * Matrix::Identity(n, n);
    const double t1 = rng.uniform(0, 2.5);
    const double t2 = rng.uniform(0, 2.5);
    const Matrix lhs = expm(m, t1) * expm(m, t2);
    const Matrix rhs = expm(m, t1 + t2);
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("expm overflow is an error") {
  Matrix m(1, 1);
  m << 1.0;
  CHECK_THROWS_AS(expm(m, 1e6), Error);
}

TEST_CASE("affine flow matches the closed form") {
  Matrix a(1, 1);
  a << -1.0;
  Vector b(1);
  b << 1.0;
  const AffineFlow f = affine_flow(a, b, 0.7);
  CHECK(f.transition(0, 0) == doctest::Approx(std::exp(-0.7)));
  CHECK(f.forced(0) == doctest::Approx(1.0 - std::exp(-0.7)));
}

TEST_CASE("bauer_fike") {
  Matrix sym(3, 3);
  sym << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  CHECK(bauer_fike(eigen_decompose(sym)) == doctest::Approx(1.0));
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 1;
  diag(1, 1) = 2;
  CHECK(bauer_fike(eigen_decompose(diag)) == doctest::Approx(1.0));

  Matrix near(2, 2);
  near << 1, 1, 0, 1 + 1e-6;
  // Explicit unit eigenvectors: e1 and (1, 1e-6)/|.|.
  Matrix v(2, 2);
  v << 1, 1, 0, 1e-6;
  v.col(1).normalize();
  Eigen::JacobiSVD<Matrix> svd(v);
  const double oracle = svd.singularValues()(0) / svd.singularValues()(1);
  const double kappa = bauer_fike(eigen_decompose(near));
  CHECK(kappa > 1e5);
  CHECK(kappa == doctest::Approx(oracle).epsilon(1e-4));

  Matrix jordan(2, 2);
  jordan << 1, 1, 0, 1;
  const auto e = eigen_decompose(jordan);
  CHECK_FALSE(e.is_diagonalizable);
  CHECK_THROWS_AS(bauer_fike(e), Error);
}

TEST_CASE("bauer_fike is at least one") {
  CounterRng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
    const auto e = eigen_decompose(m);
    if (!e.is_diagonalizable) continue;
    CHECK(bauer_fike(e) >= 1.0 - 1e-12);
    const ComplexMatrix lhs = m.cast<Complex>() * e.eigenvectors;
    const ComplexMatrix rhs = e.eigenvectors * e.eigenvalues.asDiagonal();
    CHECK((lhs - rhs).norm() <= 1e-8 * std::max(1.0, m.norm()));
  }
}

TEST_CASE("polynomial roots") {
  const std::vector<double> p{6, 5, 1};
  const auto r = polynomial_roots(p);
  REQUIRE(r.size() == 2);
  CHECK(r[0].real() == doctest::Approx(-3));
  CHECK(r[1].real() == doctest::Approx(-2));
  const std::vector<double> c{5};
  CHECK(polynomial_roots(c).empty());
  const std::vector<double> trailing{1, -1, 0};
  CHECK(polynomial_roots(trailing).size() == 1);
}

TEST_CASE("find_first_root closed forms") {
  const auto f1 = [](double t) { return 2.0 * std::exp(-t) - 1.0; };
  CHECK(std::abs(find_first_root(f1, 0.0, 10.0, 0.01) - std::log(2.0)) < 1e-10);
  const auto f2 = [](double t) { return t - 1.0; };
  CHECK(find_first_root(f2, 0.0, 10.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
  const auto f3 = [](double t) { return std::sin(t); };
  CHECK(std::abs(find_first_root(f3, 0.1, 10.0, 0.05) - std::numbers::pi) < 1e-10);
}

TEST_CASE("find_first_root accuracy contract") {
  const auto f = [](double t) { return std::cos(t) - 0.3; };
  const double r = find_first_root(f, 0.0, 5.0, 0.1);
  CHECK(std::abs(f(r)) < 1e-12);
  CHECK(std::abs(r - std::acos(0.3)) < 1e-12 * std::max(1.0, r));
}

TEST_CASE("find_first_root from a root with known departure") {
  // f departs upward from t = 0 and first returns at t = pi.
  const auto f = [](double t) { return std::sin(t); };
  CHECK(std::abs(find_first_root(f, 0.0, 10.0, 0.05, {}, 1) - std::numbers::pi) < 1e-10);
  CHECK_THROWS_AS(find_first_root(f, 0.0, 10.0, 0.05, {}, -1), Error);
}

TEST_CASE("find_first_root never skips an earlier crossing at step resolution") {
  // Zeros at (k + 1/2) pi / w; with step below half the spacing none is skipped.
  for (double w : {1.0, 3.0, 7.5, 20.0}) {
    const auto f = [w](double t) { return std::cos(w * t); };
    const double step = 0.4 * std::numbers::pi / w;
    const double r = find_first_root(f, 0.0, 100.0, step);
    CHECK(std::abs(r - 0.5 * std::numbers::pi / w) < 1e-10);
  }
  // Start just after a zero: the next one is found, not a later one.
  const auto g = [](double t) { return std::sin(5.0 * t); };
  const double r = find_first_root(g, 0.7, 50.0, 0.05);
  CHECK(std::abs(r - 0.4 * std::numbers::pi) < 1e-10);
}

TEST_CASE("find_first_root errors") {
  const auto f = [](double t) { return 1.0 + t; };
  CHECK_THROWS_AS(find_first_root(f, 0.0, 5.0, 0.1), Error);
  const auto g = [](double t) { return t > 1.0 ? NAN : 1.0; };
  CHECK_THROWS_AS(find_first_root(g, 0.0, 5.0, 0.1), Error);
}

TEST_CASE("integrate_adaptive linear decay") {
  const auto rhs = [](double, const Vector& x, Vector& dx) { dx = -x; };
  Vector x0(1);
  x0 << 1.0;
  OdeOptions opt;
  opt.rel_tol = 1e-9;
  opt.abs_tol = 1e-12;
  const auto tr = integrate_adaptive(rhs, x0, 0.0, 1.0, opt);
  CHECK(tr.t_end() == doctest::Approx(1.0));
  CHECK(std::abs(tr.final_state()(0) - std::exp(-1.0)) < 10 * opt.rel_tol);
  // Dense Hermite interpolation between steps.
  CHECK(std::abs(tr(0.37)(0) - std::exp(-0.37)) < 1e-6);
}

TEST_CASE("integrate_adaptive harmonic oscillator energy drift") {
  const auto rhs = [](double, const Vector& x, Vector& dx) {
    dx.resize(2);
    dx << x(1), -x(0);
  };
  Vector x0(2);
  x0 << 1.0, 0.0;
  OdeOptions opt;
  opt.rel_tol = 1e-9;
  opt.abs_tol = 1e-12;
  opt.sample_dt = 0.1;
  const double t1 = 20.0 * std::numbers::pi;
  const auto tr = integrate_adaptive(rhs, x0, 0.0, t1, opt);
  double drift = 0.0;
  for (const Vector& s : tr.samples) drift = std::max(drift, std::abs(s.squaredNorm() - 1.0));
  CHECK(drift < 1e-6);
  CHECK(std::abs(tr.final_state()(0) - std::cos(t1)) < 1e-7);
  // Uniform samples come from the dense output.
  CHECK(std::abs(tr.samples[13](0) - std::cos(tr.sample_times[13])) < 1e-8);
}

TEST_CASE("integrate_adaptive constant field and observer stop") {
  const auto rhs = [](double, const Vector& x, Vector& dx) { dx = Vector::Zero(x.size()); };
  Vector x0(3);
  x0 << 1, 2, 3;
  const auto tr = integrate_adaptive(rhs, x0, 0.0, 5.0);
  CHECK(tr.final_state().isApprox(x0));

  const auto lin = [](double, const Vector&, Vector& dx) { dx = Vector::Ones(1); };
  Vector y0 = Vector::Zero(1);
  double stop_at = 0.0;
  const auto tr2 = integrate_adaptive(lin, y0, 0.0, 10.0, {}, [&](const StepView& sv) {
    if (sv.x(0) > 2.0) {
      stop_at = sv.state_at(0.5 * (sv.t_prev + sv.t))(0);
      return true;
    }
    return false;
  });
  CHECK(tr2.stopped_early);
  CHECK(tr2.t_end() < 10.0);
  CHECK(stop_at > 0.0);
}

TEST_CASE("integrate_adaptive step underflow is an error") {
  // Finite-time blow-up forces the step below the floor.
  const auto rhs = [](double, const Vector& x, Vector& dx) { dx = x.array().square().matrix(); };
  Vector x0(1);
  x0 << 1.0;
  OdeOptions opt;
  opt.min_step = 1e-6;
  try {
    integrate_adaptive(rhs, x0, 0.0, 2.0, opt);
    FAIL("expected step underflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStepUnderflow);
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
}

TEST_CASE("counter rng is deterministic and stream separated") {
  CounterRng a(42), b(42), c(42, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CounterRng d(42);
  CHECK(d.next_u64() != c.next_u64());
}
