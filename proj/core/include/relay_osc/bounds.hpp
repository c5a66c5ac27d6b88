#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relay_osc/plant.hpp"

namespace relay_osc {

// ||e^{At}||_2 <= m_initial e^{-sigma_slowest t}
struct DecayEnvelope {
  double m_initial = 1.0;
  double sigma_slowest = 0.0;
  double epsilon_margin = 0.0;
  double verified_max_ratio = 0.0;  // max of ||e^{At}|| e^{sigma t} / m_initial on the check grid
  bool used_eigenvector_fallback = false;
};

struct BoundsReport {
  double norm_a = 0.0;
  double norm_b = 0.0;
  double m_loose = 0.0;
  double ball_radius = 0.0;
  double t_excursions_over = 0.0;
  double m_excursion = 0.0;
  std::optional<double> t_min_inter_switch;
  std::optional<long long> k_iterations;
  std::string explanation;
};

struct SetD {
  double radius = 0.0;
  double strip_halfwidth = 0.0;
  int order = 0;

  bool contains(const Vector& x, double tol = 1e-10) const;
};

// Throws kNotHurwitz. epsilon <= 0 selects 1e-3 * min |Re lambda|.
DecayEnvelope decay_envelope(const Matrix& a, double epsilon = 0.0);

BoundsReport bounds_report(const StateSpace& ss, const DecayEnvelope& env);

SetD make_set_d(const StateSpace& ss, const BoundsReport& report);

// Uniform samples on D. Throws kEmptySet.
// attempts, when given, receives the number of candidate draws.
std::vector<Vector> sample_D(const SetD& d, std::size_t count, std::uint64_t seed,
                             std::size_t* attempts = nullptr);

// Right-hand side of the state magnitude bound at time t.
double state_magnitude_bound(const DecayEnvelope& env, double norm_b, double norm_x0,
                             double t);

}  // namespace relay_osc
