#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relay_osc/bounds.hpp"
#include "relay_osc/limit_cycle.hpp"
#include "relay_osc/plant.hpp"
#include "relay_osc/poincare.hpp"
#include "relay_osc/relay_dynamics.hpp"
#include "relay_osc/sfs.hpp"

namespace relay_osc {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form, independent of locale.
std::string format_double(double value);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const std::vector<Complex>& values);
Json to_json(const TransferFunction& tf);
Json to_json(const PlantClass& pc);
Json to_json(const SwitchEvent& e);
Json to_json(const SlidingReport& s);
Json to_json(const DecayEnvelope& env);
Json to_json(const BoundsReport& report);
Json to_json(const FixedPointResult& r);
Json to_json(const OrbitCandidate& orbit);
Json to_json(const MonodromyReport& m);
Json to_json(const FloquetReport& f);
Json to_json(const Crossing& c);
Json to_json(const HopfReport& h);
Json to_json(const HyperbolicityResult& h);

// {"schema_version": .., "toolkit_version": .., "kind": kind, ...body}
Json envelope(const std::string& kind, Json body);

// Events of a simulation as a JSON log.
Json event_log(const SimulationResult& sim);

// Parses {"num": [...], "den": [...]} with ascending powers.
TransferFunction plant_from_json(const nlohmann::json& j);

std::string csv_header_comment(const std::string& units);

void write_trajectory_csv(std::ostream& out, const SimulationResult& sim);
void write_survey_csv(std::ostream& out, const SpectralSurvey& survey);
void write_root_locus_csv(std::ostream& out, const RootLocusScan& scan);
void write_orbit_csv(std::ostream& out, const std::vector<OrbitSample>& samples);
void write_sfs_csv(std::ostream& out, const StateSpace& ss, double gamma,
                   const DenseTrajectory& traj);

}  // namespace relay_osc
