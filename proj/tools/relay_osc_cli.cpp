// relay_osc command-line tool. Every subcommand reads a plant from --num/--den
// (ascending powers, denominator including its leading coefficient) or from a
// JSON file given with --plant.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relay_osc/bounds.hpp"
#include "relay_osc/error.hpp"
#include "relay_osc/io.hpp"
#include "relay_osc/limit_cycle.hpp"
#include "relay_osc/poincare.hpp"
#include "relay_osc/random.hpp"
#include "relay_osc/relay_dynamics.hpp"
#include "relay_osc/sfs.hpp"
#include "relay_osc/version.hpp"

namespace ro = relay_osc;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitModuleError = 3;

struct PlantArgs {
  std::string num;
  std::string den;
  std::string file;
  bool descending = false;
};

struct OutputArgs {
  std::string out;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    std::size_t b = pos;
    std::size_t e = end;
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    double v = 0.0;
    const char* first = text.data() + b;
    const char* last = text.data() + e;
    if (b < e && *first == '+') ++first;
    const auto r = std::from_chars(first, last, v);
    if (b == e || r.ec != std::errc() || r.ptr != last) {
      throw ro::Error(ro::ErrorCode::kInvalidPlant,
                      std::string("malformed ") + what + " list: '" + text + "'");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

ro::TransferFunction load_plant(const PlantArgs& p) {
  if (!p.file.empty()) {
    std::ifstream in(p.file);
    if (!in) throw ro::Error(ro::ErrorCode::kInvalidPlant, "cannot open plant file " + p.file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ro::Error(ro::ErrorCode::kInvalidPlant, std::string("plant file: ") + e.what());
    }
    return ro::plant_from_json(j);
  }
  if (p.num.empty() || p.den.empty()) {
    throw ro::Error(ro::ErrorCode::kInvalidPlant, "a plant needs --num and --den, or --plant");
  }
  const auto num = parse_list(p.num, "numerator");
  const auto den = parse_list(p.den, "denominator");
  return p.descending ? ro::parse_plant_descending(num, den) : ro::parse_plant(num, den);
}

ro::Vector vector_from(const std::vector<double>& v) {
  return Eigen::Map<const ro::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ro::Vector state_or_random(const std::string& text, int n, std::uint64_t seed, double scale) {
  if (!text.empty()) {
    const auto v = parse_list(text, "state");
    if (static_cast<int>(v.size()) != n) {
      throw ro::Error(ro::ErrorCode::kInvalidArgument,
                      "--x0 needs " + std::to_string(n) + " entries");
    }
    return vector_from(v);
  }
  ro::CounterRng rng(seed, 1);
  ro::Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = scale * rng.uniform(-1.0, 1.0);
  return x;
}

void emit(const OutputArgs& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ro::Error(ro::ErrorCode::kInvalidArgument, "cannot write " + o.out);
  f << text;
}

void emit_json(const OutputArgs& o, const ro::Json& j) { emit(o, j.dump(2) + "\n"); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ro::Error(ro::ErrorCode::kInvalidArgument, "cannot write " + path);
  f << text;
}

ro::JumpModel parse_jump_model(const std::string& s) {
  if (s == "saltation") return ro::JumpModel::kSaltation;
  if (s == "reciprocal-sum") return ro::JumpModel::kReciprocalSum;
  throw ro::Error(ro::ErrorCode::kInvalidArgument, "unknown jump model " + s);
}

void add_plant_options(CLI::App* cmd, PlantArgs& p) {
  cmd->add_option("--num", p.num, "Numerator coefficients, comma separated (ascending powers)");
  cmd->add_option("--den", p.den,
                  "Denominator coefficients including the leading one (ascending powers)");
  cmd->add_option("--plant", p.file, "JSON plant file {\"num\": [...], \"den\": [...]}");
  cmd->add_flag("--descending", p.descending, "Coefficient lists are in descending powers");
}

void add_output_option(CLI::App* cmd, OutputArgs& o) {
  cmd->add_option("--out,-o", o.out, "Output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay feedback oscillation analysis"};
  app.set_version_flag("--version", std::string(ro::kToolkitVersion));
  app.require_subcommand(1);

  PlantArgs plant;
  OutputArgs output;
  std::uint64_t seed = 0;
  std::function<void()> run;

  // classify
  auto* classify = app.add_subcommand("classify", "Classify a plant and list poles and zeros");
  add_plant_options(classify, plant);
  add_output_option(classify, output);
  classify->callback([&] {
    run = [&] {
      const auto tf = load_plant(plant);
      ro::Json body = ro::to_json(ro::classify(tf));
      body["plant"] = ro::to_json(tf);
      emit_json(output, ro::envelope("classify", body));
    };
  });

  // simulate
  std::string x0_text;
  double t_end = 50.0;
  double dt = 0.01;
  std::string sim_format = "csv";
  std::string events_path;
  auto* simulate = app.add_subcommand("simulate", "Event-driven relay feedback simulation");
  add_plant_options(simulate, plant);
  add_output_option(simulate, output);
  simulate->add_option("--x0", x0_text, "Initial state (default 0.1 * uniform(-1,1) from --seed)");
  simulate->add_option("--t-end", t_end, "Final time")->capture_default_str();
  simulate->add_option("--dt", dt, "Sample spacing of the CSV grid")->capture_default_str();
  simulate->add_option("--format", sim_format, "csv (trajectory) or json (event log)")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  simulate->add_option("--events", events_path, "Also write the JSON event log here");
  simulate->add_option("--seed", seed, "Seed for the default initial state")->capture_default_str();
  simulate->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const ro::RelaySystem sys(ss);
      const ro::Vector x0 = state_or_random(x0_text, ss.order(), seed, 0.1);
      const auto sim = sys.simulate(x0, t_end, {.sample_dt = dt});
      const ro::Json log = ro::envelope("event_log", ro::event_log(sim));
      if (!events_path.empty()) write_file(events_path, log.dump(2) + "\n");
      if (sim_format == "json") {
        emit_json(output, log);
      } else {
        std::ostringstream os;
        ro::write_trajectory_csv(os, sim);
        emit(output, os.str());
      }
    };
  });

  // bounds
  double epsilon = 0.0;
  auto* bounds = app.add_subcommand("bounds", "Decay envelope, ultimate ball and switch bounds");
  add_plant_options(bounds, plant);
  add_output_option(bounds, output);
  bounds->add_option("--epsilon", epsilon, "Spectral margin (0 selects 1e-3 * min |Re lambda|)")
      ->capture_default_str();
  bounds->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const auto env = ro::decay_envelope(ss.a, epsilon);
      const auto br = ro::bounds_report(ss, env);
      const auto d = ro::make_set_d(ss, br);
      ro::Json body{{"envelope", ro::to_json(env)}, {"bounds", ro::to_json(br)}};
      body["set_d"] = ro::Json{{"radius", d.radius}, {"strip_halfwidth", d.strip_halfwidth}};
      emit_json(output, ro::envelope("bounds", body));
    };
  });

  // poincare-survey
  std::size_t count = 10000;
  int k = 1;
  unsigned threads = 0;
  std::string summary_path;
  auto* survey = app.add_subcommand("poincare-survey",
                                    "Spectral statistics of Poincare jacobians sampled on D");
  add_plant_options(survey, plant);
  add_output_option(survey, output);
  survey->add_option("--count", count, "Number of sample points")->capture_default_str();
  survey->add_option("--k", k, "Switches per return map")->capture_default_str();
  survey->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  survey->add_option("--threads", threads, "Worker threads (0: RELAY_OSC_THREADS or all cores)")
      ->capture_default_str();
  survey->add_option("--summary", summary_path, "Write a JSON summary here");
  survey->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const ro::RelaySystem sys(ss);
      const auto br = ro::bounds_report(ss, ro::decay_envelope(ss.a));
      const auto d = ro::make_set_d(ss, br);
      const auto result = ro::spectral_survey(sys, d, count, k, seed, {.threads = threads});
      std::ostringstream os;
      ro::write_survey_csv(os, result);
      emit(output, os.str());
      if (!summary_path.empty()) {
        const ro::Json s = ro::envelope(
            "survey_summary", {{"samples", result.samples.size()},
                               {"skipped", result.skipped},
                               {"schur_stable_fraction", result.schur_stable_fraction()}});
        write_file(summary_path, s.dump(2) + "\n");
      }
    };
  });

  // fixed-point
  int max_iter = 200;
  double tol = 1e-11;
  auto* fixed = app.add_subcommand("fixed-point", "Fixed point of -psi_+(.;k) on D");
  add_plant_options(fixed, plant);
  add_output_option(fixed, output);
  fixed->add_option("--k", k, "Switches per return map")->capture_default_str();
  fixed->add_option("--x0", x0_text, "Start point in D (default: sampled from D with --seed)");
  fixed->add_option("--seed", seed, "Seed for the default start point")->capture_default_str();
  fixed->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
  fixed->add_option("--tol", tol, "Residual tolerance relative to max(1, |x|)")
      ->capture_default_str();
  fixed->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const ro::RelaySystem sys(ss);
      const auto br = ro::bounds_report(ss, ro::decay_envelope(ss.a));
      const auto d = ro::make_set_d(ss, br);
      const ro::Vector x0 = x0_text.empty() ? ro::sample_D(d, 1, seed).front()
                                            : state_or_random(x0_text, ss.order(), seed, 0.0);
      ro::FixedPointOptions opt;
      opt.max_iter = max_iter;
      opt.tol = tol;
      const auto r = ro::fixed_point_search(sys, d, k, x0, opt);
      emit_json(output, ro::envelope("fixed_point", ro::to_json(r)));
    };
  });

  // find-orbit
  double tau_min = 0.0;
  double tau_max = 0.0;
  int grid = 2000;
  std::string orbit_csv;
  std::string jump_model = "saltation";
  auto* find = app.add_subcommand("find-orbit", "Symmetric unimodal orbit and its monodromy");
  add_plant_options(find, plant);
  add_output_option(find, output);
  find->add_option("--tau-min", tau_min, "Lower end of the half-period scan (0: t_min bound)")
      ->capture_default_str();
  find->add_option("--tau-max", tau_max, "Upper end of the scan (0: 100 / sigma_slowest)")
      ->capture_default_str();
  find->add_option("--grid", grid, "Log-spaced scan points")->capture_default_str();
  find->add_option("--orbit-csv", orbit_csv, "Write the dense orbit (t, x, u, y) here");
  find->add_option("--jump-model", jump_model, "saltation or reciprocal-sum")
      ->check(CLI::IsMember({"saltation", "reciprocal-sum"}))
      ->capture_default_str();
  find->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const ro::RelaySystem sys(ss);
      ro::OrbitSearchOptions opt;
      if (tau_min > 0.0) opt.tau_min = tau_min;
      if (tau_max > 0.0) opt.tau_max = tau_max;
      opt.grid_points = grid;
      const auto search = ro::find_symmetric_orbits(sys, opt);
      if (!search.best) {
        throw ro::Error(ro::ErrorCode::kNoOrbit, "no symmetric unimodal candidate");
      }
      const auto& orbit = *search.best;
      ro::Json candidates = ro::Json::array();
      for (const auto& c : search.candidates) candidates.push_back(ro::to_json(c));
      ro::Json body = ro::to_json(orbit);
      body["candidates"] = candidates;
      body["jump_model"] = jump_model;
      body["monodromy"] = ro::to_json(ro::monodromy_exact(orbit, ss, parse_jump_model(jump_model)));
      emit_json(output, ro::envelope("orbit", body));
      if (!orbit_csv.empty()) {
        std::ostringstream os;
        ro::write_orbit_csv(os, ro::orbit_samples(orbit, sys, 500));
        write_file(orbit_csv, os.str());
      }
    };
  });

  // monodromy
  double gamma = 1e4;
  auto* mono = app.add_subcommand("monodromy",
                                  "Monodromy matrices: exact jump, sinusoid and smooth-flow Floquet");
  add_plant_options(mono, plant);
  add_output_option(mono, output);
  mono->add_option("--gamma", gamma, "Smooth feedback gain for the Floquet integration")
      ->capture_default_str();
  mono->add_option("--jump-model", jump_model, "saltation or reciprocal-sum")
      ->check(CLI::IsMember({"saltation", "reciprocal-sum"}))
      ->capture_default_str();
  mono->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const ro::RelaySystem sys(ss);
      const auto orbit = ro::find_symmetric_orbit(sys);
      ro::Json body{{"orbit", ro::to_json(orbit)}, {"jump_model", jump_model}};
      body["exact"] = ro::to_json(ro::monodromy_exact(orbit, ss, parse_jump_model(jump_model)));
      body["sinusoid"] = ro::to_json(ro::monodromy_sinusoid(orbit, ss));
      body["floquet"] = ro::to_json(ro::monodromy_floquet(ss, gamma, orbit));
      emit_json(output, ro::envelope("monodromy", body));
    };
  });

  // root-locus
  double gamma_max = 1e3;
  double gamma_min = 1e-2;
  int points = 400;
  std::string tracks_path;
  bool classify_hopf = false;
  auto* locus = app.add_subcommand("root-locus",
                                   "Eigenvalues of A - gamma B C and imaginary-axis crossings");
  add_plant_options(locus, plant);
  add_output_option(locus, output);
  locus->add_option("--gamma-max", gamma_max, "Upper end of the gamma sweep")->capture_default_str();
  locus->add_option("--gamma-min", gamma_min, "Lower end of the gamma sweep")->capture_default_str();
  locus->add_option("--points", points, "Log-spaced gamma points")->capture_default_str();
  locus->add_option("--tracks", tracks_path, "Write eigenvalue tracks as CSV here");
  locus->add_flag("--classify", classify_hopf,
                  "Classify the first Hopf crossing by simulating past it");
  locus->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const auto scan = ro::root_locus(ss, gamma_max, points, gamma_min);
      ro::Json crossings = ro::Json::array();
      for (const auto& c : scan.crossings) crossings.push_back(ro::to_json(c));
      ro::Json body{{"gamma_min", gamma_min}, {"gamma_max", gamma_max}, {"points", points}};
      body["crossings"] = crossings;
      body["hyperbolicity"] = ro::to_json(ro::hyperbolicity_check(ss, gamma_max));
      if (classify_hopf) body["hopf"] = ro::to_json(ro::hopf_classify(ss, scan));
      emit_json(output, ro::envelope("root_locus", body));
      if (!tracks_path.empty()) {
        std::ostringstream os;
        ro::write_root_locus_csv(os, scan);
        write_file(tracks_path, os.str());
      }
    };
  });

  // sfs-sim
  double sfs_gamma = 100.0;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  auto* sfs = app.add_subcommand("sfs-sim", "Simulate the tanh-smoothed feedback system");
  add_plant_options(sfs, plant);
  add_output_option(sfs, output);
  sfs->add_option("--gamma", sfs_gamma, "Gain inside tanh")->capture_default_str();
  sfs->add_option("--x0", x0_text, "Initial state (default 0.1 * uniform(-1,1) from --seed)");
  sfs->add_option("--seed", seed, "Seed for the default initial state")->capture_default_str();
  sfs->add_option("--t-end", t_end, "Final time")->capture_default_str();
  sfs->add_option("--dt", dt, "Sample spacing")->capture_default_str();
  sfs->add_option("--rel-tol", rel_tol, "Integrator relative tolerance")->capture_default_str();
  sfs->add_option("--abs-tol", abs_tol, "Integrator absolute tolerance")->capture_default_str();
  sfs->callback([&] {
    run = [&] {
      const auto ss = ro::realize(load_plant(plant));
      const ro::Vector x0 = state_or_random(x0_text, ss.order(), seed, 0.1);
      ro::SfsConfig cfg{sfs_gamma, {.rel_tol = rel_tol, .abs_tol = abs_tol, .sample_dt = dt}};
      const auto traj = ro::simulate_sfs(ss, cfg, x0, t_end);
      std::ostringstream os;
      ro::write_sfs_csv(os, ss, sfs_gamma, traj);
      emit(output, os.str());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (run) run();
  } catch (const ro::Error& e) {
    if (e.code() == ro::ErrorCode::kInvalidPlant) {
      std::cerr << "invalid plant: " << e.what() << '\n';
      return kExitInvalidInput;
    }
    const ro::Json err{{"error", std::string(ro::to_string(e.code()))}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitModuleError;
  } catch (const std::exception& e) {
    const ro::Json err{{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitModuleError;
  }
  return 0;
}
