#include "relay_osc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "relay_osc/error.hpp"
#include "relay_osc/version.hpp"

namespace relay_osc {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

namespace {

Json number(double v) {
  if (!std::isfinite(v)) return Json(nullptr);
  return Json(v == 0.0 ? 0.0 : v);  // no signed zero in output
}

Json complex_json(const Complex& z) { return Json::array({number(z.real()), number(z.imag())}); }

}  // namespace

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(number(v(i)));
  return j;
}

Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    j.push_back(std::move(row));
  }
  return j;
}

Json to_json(const std::vector<Complex>& values) {
  Json j = Json::array();
  for (const Complex& z : values) j.push_back(complex_json(z));
  return j;
}

Json to_json(const TransferFunction& tf) {
  std::vector<double> den = tf.den;
  den.push_back(1.0);
  return Json{{"num", tf.num}, {"den", den}, {"order", tf.order()}};
}

Json to_json(const PlantClass& pc) {
  return Json{{"is_brl_urf", pc.is_brl_urf},
              {"is_stable", pc.is_stable},
              {"has_marginal_pole", pc.has_marginal_pole},
              {"dc_gain", number(pc.dc_gain)},
              {"relative_degree", pc.relative_degree},
              {"n_positive_real_zeros", pc.n_positive_real_zeros},
              {"zeros", to_json(pc.zeros)},
              {"poles", to_json(pc.poles)},
              {"notes", pc.notes}};
}

Json to_json(const SwitchEvent& e) {
  return Json{{"t", number(e.t)},
              {"x", to_json(e.x)},
              {"incoming_sign", e.incoming_sign},
              {"transversal_speed", number(e.transversal_speed)},
              {"grazing", e.grazing}};
}

Json to_json(const SlidingReport& s) {
  Json j{{"entered_sliding", s.entered_sliding}};
  if (s.entered_sliding) {
    j["entry_time"] = number(s.entry_time);
    j["entry_state"] = to_json(s.entry_state);
  }
  return j;
}

Json to_json(const DecayEnvelope& env) {
  return Json{{"m_initial", number(env.m_initial)},
              {"sigma_slowest", number(env.sigma_slowest)},
              {"epsilon_margin", number(env.epsilon_margin)},
              {"verified_max_ratio", number(env.verified_max_ratio)},
              {"used_eigenvector_fallback", env.used_eigenvector_fallback}};
}

Json to_json(const BoundsReport& r) {
  Json j{{"norm_a", number(r.norm_a)},
         {"norm_b", number(r.norm_b)},
         {"m_loose", number(r.m_loose)},
         {"ball_radius", number(r.ball_radius)},
         {"t_excursions_over", number(r.t_excursions_over)},
         {"m_excursion", number(r.m_excursion)}};
  j["t_min_inter_switch"] = r.t_min_inter_switch ? number(*r.t_min_inter_switch) : Json(nullptr);
  j["k_iterations"] = r.k_iterations ? Json(*r.k_iterations) : Json(nullptr);
  if (!r.explanation.empty()) j["explanation"] = r.explanation;
  return j;
}

Json to_json(const FixedPointResult& r) {
  return Json{{"x_hat", to_json(r.x_hat)},
              {"k", r.k},
              {"residual", number(r.residual)},
              {"iterations_used", r.iterations_used},
              {"converged", r.converged},
              {"used_newton", r.used_newton}};
}

Json to_json(const OrbitCandidate& o) {
  Json speeds = Json::array();
  for (const SwitchSpeeds& s : o.switch_speeds) {
    speeds.push_back(Json{{"rho_minus", number(s.rho_minus)}, {"rho_plus", number(s.rho_plus)}});
  }
  return Json{{"half_period", number(o.half_period)},
              {"period", number(o.period)},
              {"anchor", to_json(o.anchor)},
              {"is_symmetric_unimodal", o.is_symmetric_unimodal},
              {"peak_output", number(o.peak_output)},
              {"min_sign_margin", number(o.min_sign_margin)},
              {"switch_speeds", speeds}};
}

Json to_json(const MonodromyReport& m) {
  return Json{{"matrix", to_json(m.matrix)},
              {"floquet_multipliers", to_json(m.floquet_multipliers)},
              {"det", number(m.det)},
              {"det_limit_formula", number(m.det_limit_formula)},
              {"det_exact_limit", number(m.det_exact_limit)},
              {"trivial_multiplier_error", number(m.trivial_multiplier_error)}};
}

Json to_json(const FloquetReport& f) {
  return Json{{"gamma", number(f.gamma)},
              {"period", number(f.period)},
              {"anchor", to_json(f.anchor)},
              {"liouville_det", number(f.liouville_det)},
              {"closure_error", number(f.closure_error)},
              {"shooting_iterations", f.shooting_iterations},
              {"monodromy", to_json(f.monodromy)}};
}

Json to_json(const Crossing& c) {
  return Json{{"gamma0", number(c.gamma0)},
              {"omega0", number(c.omega0)},
              {"direction", c.direction},
              {"odd_multiplicity", c.odd_multiplicity},
              {"kind", c.kind == CrossingKind::kHopf ? "hopf" : "pitchfork"}};
}

Json to_json(const HopfReport& h) {
  Json evidence = Json::array();
  for (const HopfEvidence& e : h.evidence) {
    evidence.push_back(Json{{"delta", number(e.delta)},
                            {"gamma", number(e.gamma)},
                            {"amplitude", number(e.amplitude)},
                            {"outcome", e.outcome}});
  }
  const char* kind = h.kind == HopfKind::kSupercritical  ? "supercritical"
                     : h.kind == HopfKind::kSubcritical ? "subcritical"
                                                        : "undetermined";
  return Json{{"gamma0", number(h.gamma0)},
              {"omega0", number(h.omega0)},
              {"kind", kind},
              {"pitchfork_gammas", h.pitchfork_gammas},
              {"evidence", evidence}};
}

Json to_json(const HyperbolicityResult& h) {
  return Json{{"hyperbolic", h.hyperbolic},
              {"witness", h.witness ? number(*h.witness) : Json(nullptr)},
              {"min_margin", number(h.min_margin)},
              {"grid_points", h.grid_points}};
}

Json envelope(const std::string& kind, Json body) {
  Json j{{"schema_version", kSchemaVersion}, {"toolkit_version", kToolkitVersion}, {"kind", kind}};
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

Json event_log(const SimulationResult& sim) {
  Json events = Json::array();
  for (const SwitchEvent& e : sim.trajectory.events) events.push_back(to_json(e));
  return Json{{"events", events},
              {"t_end", number(sim.trajectory.t_end)},
              {"final_state", to_json(sim.trajectory.final_state)},
              {"certified", sim.trajectory.certified},
              {"sliding", to_json(sim.sliding)}};
}

TransferFunction plant_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den")) {
    throw Error(ErrorCode::kInvalidPlant, "plant file needs \"num\" and \"den\" arrays");
  }
  std::vector<double> num;
  std::vector<double> den;
  try {
    num = j.at("num").get<std::vector<double>>();
    den = j.at("den").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidPlant, std::string("plant file: ") + e.what());
  }
  return parse_plant(num, den);
}

std::string csv_header_comment(const std::string& units) {
  return std::string("# relay_osc ") + kToolkitVersion + "; " + units;
}

void write_trajectory_csv(std::ostream& out, const SimulationResult& sim) {
  const Trajectory& tr = sim.trajectory;
  const int n = static_cast<int>(tr.final_state.size());
  out << csv_header_comment("t in plant time units; x and u dimensionless") << '\n';
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",u,is_switch\n";
  const auto row = [&](double t, const Vector& x, int u, int sw) {
    out << format_double(t);
    for (int i = 0; i < n; ++i) out << ',' << format_double(x(i));
    out << ',' << u << ',' << sw << '\n';
  };
  std::size_t e = 0;
  for (std::size_t i = 0; i < tr.sample_times.size(); ++i) {
    while (e < tr.events.size() && tr.events[e].t <= tr.sample_times[i]) {
      row(tr.events[e].t, tr.events[e].x, -tr.events[e].incoming_sign, 1);
      ++e;
    }
    row(tr.sample_times[i], tr.samples[i], tr.sample_signs[i], 0);
  }
  for (; e < tr.events.size(); ++e) row(tr.events[e].t, tr.events[e].x, -tr.events[e].incoming_sign, 1);
}

void write_survey_csv(std::ostream& out, const SpectralSurvey& survey) {
  out << csv_header_comment("spectral statistics are dimensionless") << '\n';
  out << "point_id,rho_astrom,rho_exact,norm_astrom,norm_exact,bf_astrom,bf_exact,schur_stable\n";
  for (const SpectralSample& s : survey.samples) {
    out << s.point_id << ',' << format_double(s.rho_astrom) << ',' << format_double(s.rho_exact)
        << ',' << format_double(s.norm_astrom) << ',' << format_double(s.norm_exact) << ','
        << format_double(s.bauer_fike_astrom) << ',' << format_double(s.bauer_fike_exact) << ','
        << (s.schur_stable ? 1 : 0) << '\n';
  }
}

void write_root_locus_csv(std::ostream& out, const RootLocusScan& scan) {
  const std::size_t n = scan.eigen_tracks.empty() ? 0 : scan.eigen_tracks.front().size();
  out << csv_header_comment("gamma dimensionless; eigenvalues in 1/time") << '\n';
  out << "gamma";
  for (std::size_t i = 1; i <= n; ++i) out << ",re_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",im_" << i;
  out << '\n';
  for (std::size_t k = 0; k < scan.gamma_grid.size(); ++k) {
    out << format_double(scan.gamma_grid[k]);
    for (const Complex& z : scan.eigen_tracks[k]) out << ',' << format_double(z.real());
    for (const Complex& z : scan.eigen_tracks[k]) out << ',' << format_double(z.imag());
    out << '\n';
  }
}

void write_orbit_csv(std::ostream& out, const std::vector<OrbitSample>& samples) {
  const int n = samples.empty() ? 0 : static_cast<int>(samples.front().x.size());
  out << csv_header_comment("t in plant time units; x, u, y dimensionless") << '\n';
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",u,y\n";
  for (const OrbitSample& s : samples) {
    out << format_double(s.t);
    for (int i = 0; i < n; ++i) out << ',' << format_double(s.x(i));
    out << ',' << s.u << ',' << format_double(s.y) << '\n';
  }
}

void write_sfs_csv(std::ostream& out, const StateSpace& ss, double gamma,
                   const DenseTrajectory& traj) {
  const int n = ss.order();
  out << csv_header_comment("t in plant time units; x, u, y dimensionless; u = tanh(gamma y)")
      << '\n';
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",u,y\n";
  const bool sampled = !traj.sample_times.empty();
  const auto& times = sampled ? traj.sample_times : traj.step_times;
  const auto& states = sampled ? traj.samples : traj.step_states;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double y = ss.c.dot(states[k]);
    out << format_double(times[k]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(states[k](i));
    out << ',' << format_double(std::tanh(gamma * y)) << ',' << format_double(y) << '\n';
  }
}

}  // namespace relay_osc
