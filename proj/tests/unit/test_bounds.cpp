#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relay_osc/bounds.hpp"
#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/relay_dynamics.hpp"
#include "test_support.hpp"

using namespace relay_osc;
using namespace relay_osc::testing;

namespace {

// max over a t-grid of ||e^{At}|| e^{sigma t}
double envelope_ratio(const Matrix& a, double sigma, double t_end, int points) {
  double worst = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double t = t_end * i / points;
    worst = std::max(worst, norm2(expm(a, t)) * std::exp(sigma * t));
  }
  return worst;
}

}  // namespace

TEST_CASE("scalar envelope") {
  Matrix a(1, 1);
  a << -1.0;
  const auto env = decay_envelope(a, 0.01);
  CHECK(env.sigma_slowest == doctest::Approx(0.99));
  CHECK(env.epsilon_margin == 0.01);
  CHECK(env.m_initial >= 1.0);
  CHECK(env.m_initial <= 1.05 + 1e-12);
}

TEST_CASE("normal matrix envelope") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1;
  a(1, 1) = -3;
  const auto env = decay_envelope(a);
  CHECK(env.sigma_slowest == doctest::Approx(1.0 - 1e-3));
  // The grid maximum is exactly 1; the reported constant carries the 5% inflation.
  CHECK(env.m_initial >= 1.0);
  CHECK(env.m_initial <= 1.05 + 1e-12);
}

TEST_CASE("companion envelope is verified on a finer grid") {
  const auto ss = realize(second_order_tf());
  const auto env = decay_envelope(ss.a);
  CHECK(env.sigma_slowest == doctest::Approx(2.0 - 2e-3));
  CHECK(env.m_initial > 1.0);
  const double t_end = 20.0 / env.sigma_slowest;
  CHECK(envelope_ratio(ss.a, env.sigma_slowest, t_end, 20000) <= env.m_initial);
  CHECK(env.verified_max_ratio <= 1.0);

  CounterRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = realize(random_stable_tf(rng, 2 + trial % 4));
    const auto e = decay_envelope(s.a);
    const double te = 20.0 / e.sigma_slowest;
    CHECK(envelope_ratio(s.a, e.sigma_slowest, te, 5000) <= e.m_initial);
    CHECK(e.m_initial >= 1.0);
  }
}

TEST_CASE("non-Hurwitz matrices are rejected") {
  Matrix a(2, 2);
  a << 0, 1, -1, 0;
  CHECK_THROWS_AS(decay_envelope(a), Error);
  Matrix b(1, 1);
  b << 0.5;
  try {
    decay_envelope(b);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotHurwitz);
  }
}

TEST_CASE("bounds formulas") {
  const auto ss = realize(second_order_tf());
  const auto env = decay_envelope(ss.a);
  const auto r = bounds_report(ss, env);
  const double m = env.m_initial, s = env.sigma_slowest;
  const double nb = ss.b.norm();
  Eigen::JacobiSVD<Matrix> svd(ss.a);
  const double na = svd.singularValues()(0);
  CHECK(r.norm_a == doctest::Approx(na).epsilon(1e-12));
  CHECK(r.norm_b == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.m_loose == doctest::Approx(2.0 * m * nb / s).epsilon(1e-14));
  CHECK(r.ball_radius == r.m_loose);
  CHECK(r.t_excursions_over == doctest::Approx(std::log(2.0 * m) / s).epsilon(1e-14));
  CHECK(r.m_excursion == doctest::Approx(m * (2.0 * m + 1.0) * nb / s).epsilon(1e-14));
  REQUIRE(r.t_min_inter_switch.has_value());
  REQUIRE(r.k_iterations.has_value());
  const double tmin = 2.0 * 1.0 / (na * r.m_excursion + nb);
  CHECK(*r.t_min_inter_switch == doctest::Approx(tmin).epsilon(1e-14));
  CHECK(*r.t_min_inter_switch > 0.0);
  CHECK(*r.k_iterations == static_cast<long long>(std::ceil(r.t_excursions_over / tmin)));
  CHECK(*r.k_iterations * *r.t_min_inter_switch >= r.t_excursions_over);
}

TEST_CASE("doubling B doubles the ball and excursion radii") {
  auto ss = realize(second_order_tf());
  const auto env = decay_envelope(ss.a);
  const auto r1 = bounds_report(ss, env);
  ss.b *= 2.0;
  const auto r2 = bounds_report(ss, env);
  CHECK(r2.m_loose == doctest::Approx(2.0 * r1.m_loose));
  CHECK(r2.m_excursion == doctest::Approx(2.0 * r1.m_excursion));
  CHECK(r2.t_excursions_over == r1.t_excursions_over);
  const double oracle = 2.0 * 2.0 / (r2.norm_a * r2.m_excursion + r2.norm_b);
  CHECK(*r2.t_min_inter_switch == doctest::Approx(oracle));
}

TEST_CASE("zero leading numerator gives a partial report") {
  const auto ss = realize(third_order_tf());
  const auto r = bounds_report(ss, decay_envelope(ss.a));
  CHECK_FALSE(r.t_min_inter_switch.has_value());
  CHECK_FALSE(r.k_iterations.has_value());
  CHECK_FALSE(r.explanation.empty());
  CHECK(r.m_loose > 0.0);
}

TEST_CASE("set D membership") {
  SetD d{5.0, 1.0, 3};
  Vector x(3);
  x << 0.5, 2.0, 0.0;
  CHECK(d.contains(x));
  x(1) = 0.5;
  CHECK_FALSE(d.contains(x));
  x << 4.0, 4.0, 0.0;
  CHECK_FALSE(d.contains(x));
  x << 0.0, 2.0, 0.1;
  CHECK_FALSE(d.contains(x));
}

TEST_CASE("sample_D points satisfy membership and are seed deterministic") {
  const auto ss = realize(second_order_tf());
  const auto r = bounds_report(ss, decay_envelope(ss.a));
  const SetD d = make_set_d(ss, r);
  CHECK(d.radius == r.m_loose);
  CHECK(d.strip_halfwidth == 1.0);
  const auto a = sample_D(d, 200, 7);
  const auto b = sample_D(d, 200, 7);
  const auto c = sample_D(d, 200, 8);
  REQUIRE(a.size() == 200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(d.contains(a[i], 0.0));
    CHECK(a[i](1) == 0.0);
  }
  CHECK(a[0] != c[0]);
}

TEST_CASE("sample_D acceptance fraction matches the analytic section") {
  const double radius = 3.0, h = 1.0;
  const std::size_t count = 20000;
  {
    SetD d{radius, h, 2};
    std::size_t attempts = 0;
    sample_D(d, count, 1, &attempts);
    const double p = (radius - h) / (2.0 * radius);
    const double frac = static_cast<double>(count) / attempts;
    const double sd = std::sqrt(p * (1 - p) / attempts);
    CHECK(std::abs(frac - p) < 3.0 * sd);
  }
  {
    SetD d{radius, h, 3};
    std::size_t attempts = 0;
    sample_D(d, count, 2, &attempts);
    const double segment =
        radius * radius * std::acos(h / radius) - h * std::sqrt(radius * radius - h * h);
    const double p = segment / (4.0 * radius * radius);
    const double frac = static_cast<double>(count) / attempts;
    const double sd = std::sqrt(p * (1 - p) / attempts);
    CHECK(std::abs(frac - p) < 3.0 * sd);
  }
}

TEST_CASE("sample_D in higher dimension stays uniform in radius") {
  SetD d{2.0, 0.0, 9};
  const auto pts = sample_D(d, 4000, 3);
  // Uniform in an 8-ball: P(|y| < r/2) = 2^-8 for the full ball, same on the half.
  int inner = 0;
  for (const Vector& x : pts) {
    CHECK(d.contains(x, 0.0));
    if (x.norm() < 1.0) ++inner;
  }
  const double p = std::pow(0.5, 8);
  CHECK(std::abs(inner / 4000.0 - p) < 4.0 * std::sqrt(p * (1 - p) / 4000.0));
}

TEST_CASE("empty D") {
  SetD d{1.0, 1.0, 2};
  CHECK_THROWS_AS(sample_D(d, 1, 0), Error);
}

TEST_CASE("trajectories from inside the ball respect the excursion bounds") {
  for (const auto& tf : {second_order_tf(), third_order_tf()}) {
    const RelaySystem sys(realize(tf));
    const auto& ss = sys.state_space();
    const auto env = decay_envelope(ss.a);
    const auto r = bounds_report(ss, env);
    CounterRng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      Vector x0(ss.order());
      for (int i = 0; i < ss.order(); ++i) x0(i) = rng.normal();
      x0 *= rng.uniform(0.0, r.ball_radius) / x0.norm();
      SimulateOptions opt;
      opt.sample_dt = 0.02;
      const auto res = sys.simulate(x0, 3.0 * r.t_excursions_over + 5.0, opt);
      const auto& tr = res.trajectory;
      for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].norm() <= r.m_excursion);
        if (tr.sample_times[i] >= r.t_excursions_over) {
          CHECK(tr.samples[i].norm() <= r.m_loose);
        }
      }
    }
  }
}
