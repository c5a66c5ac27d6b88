#include <cmath>

#include "doctest.h"
#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"
#include "relay_osc/plant.hpp"
#include "test_support.hpp"

using namespace relay_osc;
using namespace relay_osc::testing;

TEST_CASE("parse_plant normalizes and pads") {
  const auto tf = second_order_tf();
  CHECK(tf.order() == 2);
  CHECK(tf.num == std::vector<double>{1, -1});
  CHECK(tf.den == std::vector<double>{6, 5});

  const auto first = first_order_tf();
  CHECK(first.order() == 1);
  CHECK(first.num == std::vector<double>{1});
  CHECK(first.den == std::vector<double>{1});

  const std::vector<double> num{1, -1, 0}, den{6, 5, 3, 1};
  const auto third = parse_plant(num, den);
  CHECK(third.order() == 3);
  CHECK(third.num == std::vector<double>{1, -1, 0});

  // Non-monic input is divided through by the leading coefficient.
  const std::vector<double> num2{2, -2}, den2{12, 10, 2};
  const auto scaled = parse_plant(num2, den2);
  CHECK(scaled.num == tf.num);
  CHECK(scaled.den == tf.den);

  const std::vector<double> b{1, -1}, a{6, 5};
  const auto monic = make_monic_plant(b, a);
  CHECK(monic.den == tf.den);

  const std::vector<double> dnum{-1, 1}, dden{1, 5, 6};
  const auto desc = parse_plant_descending(dnum, dden);
  CHECK(desc.num == tf.num);
  CHECK(desc.den == tf.den);
}

TEST_CASE("parse_plant rejects bad input") {
  const std::vector<double> improper_num{1, 1, 1}, den{6, 5, 1};
  CHECK_THROWS_AS(parse_plant(improper_num, den), Error);
  const std::vector<double> num{1}, empty;
  CHECK_THROWS_AS(parse_plant(num, empty), Error);
  const std::vector<double> zero_lead{1, 0};
  CHECK_THROWS_AS(parse_plant(num, zero_lead), Error);
  const std::vector<double> constant{2};
  CHECK_THROWS_AS(parse_plant(num, constant), Error);
  const std::vector<double> bad{1, NAN};
  CHECK_THROWS_AS(parse_plant(num, bad), Error);
  try {
    parse_plant(improper_num, den);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidPlant);
  }
}

TEST_CASE("realize gives the companion form") {
  const auto ss = realize(second_order_tf());
  Matrix a(2, 2);
  a << 0, -6, 1, -5;
  CHECK(ss.a.isApprox(a));
  CHECK(ss.b(0) == 1.0);
  CHECK(ss.b(1) == -1.0);
  CHECK(ss.c(0) == 0.0);
  CHECK(ss.c(1) == 1.0);
  CHECK(ss.c.dot(ss.b) == ss.leading_num());

  const auto s1 = realize(first_order_tf());
  CHECK(s1.a(0, 0) == -1.0);
  CHECK(s1.b(0) == 1.0);
  CHECK(s1.c(0) == 1.0);

  const auto s3 = realize(third_order_tf());
  CHECK(s3.a(0, 2) == -6.0);
  CHECK(s3.a(1, 2) == -5.0);
  CHECK(s3.a(2, 2) == -3.0);
  CHECK(s3.a(1, 0) == 1.0);
  CHECK(s3.a(2, 1) == 1.0);
  CHECK(s3.b(2) == 0.0);
}

TEST_CASE("realization reproduces the transfer function") {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    const auto tf = random_stable_tf(rng, n);
    const auto ss = realize(tf);
    for (int k = 0; k < 8; ++k) {
      const Complex s(rng.uniform(-3, 3), rng.uniform(0.1, 10));
      const Complex g = ss.transfer(s);
      const Complex h = tf.evaluate(s);
      CHECK(std::abs(g - h) <= 1e-10 * std::abs(h));
    }
  }
}

TEST_CASE("realize after reparse is idempotent") {
  CounterRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto tf = random_stable_tf(rng, 1 + trial % 5);
    std::vector<double> den = tf.den;
    den.push_back(1.0);
    const auto again = parse_plant(tf.num, den);
    CHECK(again.num == tf.num);
    CHECK(again.den == tf.den);
    CHECK(realize(again).a == realize(tf).a);
  }
}

TEST_CASE("classify the example plants") {
  const auto pc = classify(second_order_tf());
  CHECK(pc.is_brl_urf);
  CHECK(pc.is_stable);
  CHECK(pc.relative_degree == 1);
  CHECK(pc.n_positive_real_zeros == 1);
  CHECK(pc.dc_gain == doctest::Approx(1.0 / 6.0));
  REQUIRE(pc.poles.size() == 2);
  CHECK(pc.poles[0].real() == doctest::Approx(-3.0));
  CHECK(pc.poles[1].real() == doctest::Approx(-2.0));
  REQUIRE(pc.zeros.size() == 1);
  CHECK(pc.zeros[0].real() == doctest::Approx(1.0));

  const auto pc3 = classify(third_order_tf());
  CHECK_FALSE(pc3.is_brl_urf);
  CHECK(pc3.relative_degree == 2);
  CHECK(pc3.is_stable);

  const auto pc1 = classify(first_order_tf());
  CHECK_FALSE(pc1.is_brl_urf);
  CHECK(pc1.n_positive_real_zeros == 0);
}

TEST_CASE("classify edge cases") {
  const std::vector<double> zero{0, 0}, den{6, 5, 1};
  const auto pz = classify(parse_plant(zero, den));
  CHECK(pz.zeros.empty());
  CHECK_FALSE(pz.is_brl_urf);

  // Pole at the origin: flagged, never BRL-URF.
  const std::vector<double> num{1, -1}, marginal{0, 1, 1};
  const auto pm = classify(parse_plant(num, marginal));
  CHECK(pm.has_marginal_pole);
  CHECK_FALSE(pm.is_stable);
  CHECK_FALSE(pm.is_brl_urf);

  // Negative dc gain.
  const std::vector<double> neg{-1, 1};
  CHECK_FALSE(classify(parse_plant(neg, den)).is_brl_urf);

  // Margin is configurable.
  const std::vector<double> slow{1e-6, 1};
  ClassifyOptions opt;
  opt.stability_margin = 1e-5;
  const std::vector<double> one{1};
  CHECK(classify(parse_plant(one, slow)).is_stable);
  CHECK_FALSE(classify(parse_plant(one, slow), opt).is_stable);
}

TEST_CASE("dc gain equals -C A^-1 B and BRL-URF sign facts hold") {
  CounterRng rng(2024);
  int brl = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto tf = random_stable_tf(rng, 1 + trial % 5);
    const auto ss = realize(tf);
    const auto pc = classify(tf);
    const double oracle = -ss.c.dot(ss.a.fullPivLu().solve(ss.b));
    CHECK(std::abs(pc.dc_gain - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    CHECK(pc.dc_gain == tf.num.front() / tf.den.front());
    if (pc.is_brl_urf) {
      ++brl;
      for (double a : tf.den) CHECK(a > 0.0);
      CHECK(tf.num.front() > 0.0);
      CHECK(tf.leading_num() < 0.0);
    }
  }
  CHECK(brl > 0);
}
