#include <cmath>
#include <sstream>

#include "doctest.h"
#include "relay_osc/error.hpp"
#include "relay_osc/io.hpp"
#include "relay_osc/limit_cycle.hpp"
#include "relay_osc/sfs.hpp"
#include "relay_osc/version.hpp"
#include "test_support.hpp"

using namespace relay_osc;
using namespace relay_osc::testing;

TEST_CASE("format_double round-trips and avoids signed zero") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(INFINITY) == "inf");
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("envelope carries the schema header") {
  const Json j = envelope("demo", Json{{"a", 1}});
  CHECK(j["schema_version"] == 1);
  CHECK(j["toolkit_version"] == std::string(kToolkitVersion));
  CHECK(j["kind"] == "demo");
  CHECK(j["a"] == 1);
  CHECK(j.begin().key() == "schema_version");
}

TEST_CASE("vectors never print negative zero") {
  Vector v(2);
  v << -0.0, 1.0;
  CHECK(to_json(v).dump() == "[0.0,1.0]");
}

TEST_CASE("plant JSON round trip") {
  const auto tf = second_order_tf();
  const Json j = to_json(tf);
  CHECK(j["den"].back() == 1.0);
  const auto back = plant_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.num == tf.num);
  CHECK(back.den == tf.den);
  CHECK_THROWS_AS(plant_from_json(nlohmann::json::parse(R"({"num": [1]})")), Error);
  CHECK_THROWS_AS(plant_from_json(nlohmann::json::parse(R"({"num": "x", "den": [1, 1]})")),
                  Error);
}

TEST_CASE("classification JSON") {
  const Json j = to_json(classify(second_order_tf()));
  CHECK(j["is_brl_urf"] == true);
  CHECK(j["relative_degree"] == 1);
  CHECK(j["poles"].size() == 2);
  CHECK(j["zeros"][0].size() == 2);
}

TEST_CASE("trajectory CSV layout") {
  const RelaySystem sys(realize(second_order_tf()));
  SimulateOptions opt;
  opt.sample_dt = 0.5;
  Vector x0(2);
  x0 << 0.5, 0.2;
  const auto sim = sys.simulate(x0, 5.0, opt);
  std::ostringstream os;
  write_trajectory_csv(os, sim);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# relay_osc ", 0) == 0);
  CHECK(line.find(kToolkitVersion) != std::string::npos);
  std::getline(in, line);
  CHECK(line == "t,x_1,x_2,u,is_switch");
  int rows = 0, switches = 0;
  double last_t = -1.0;
  while (std::getline(in, line)) {
    ++rows;
    const double t = std::stod(line.substr(0, line.find(',')));
    CHECK(t >= last_t);
    last_t = t;
    if (line.back() == '1') ++switches;
  }
  CHECK(switches == static_cast<int>(sim.trajectory.events.size()));
  CHECK(rows == static_cast<int>(sim.trajectory.samples.size() + sim.trajectory.events.size()));

  const Json log = event_log(sim);
  CHECK(log["events"].size() == sim.trajectory.events.size());
}

TEST_CASE("root locus CSV has one row per gamma") {
  const auto scan = root_locus(realize(second_order_tf()), 100.0, 20);
  std::ostringstream os;
  write_root_locus_csv(os, scan);
  std::istringstream in(os.str());
  std::string line;
  int rows = -2;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 20);
  CHECK(os.str().find("gamma,re_1,re_2,im_1,im_2") != std::string::npos);
}

TEST_CASE("orbit and monodromy JSON") {
  const RelaySystem sys(realize(second_order_tf()));
  const auto o = find_symmetric_orbit(sys);
  const Json j = to_json(o);
  CHECK(j["half_period"].get<double>() == o.half_period);
  CHECK(j["switch_speeds"].size() == 2);
  const Json m = to_json(monodromy_exact(o, sys.state_space()));
  CHECK(m["floquet_multipliers"].size() == 2);
  CHECK(m.contains("det_limit_formula"));
}
