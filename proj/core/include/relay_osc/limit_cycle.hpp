#pragma once

#include <optional>
#include <vector>

#include "relay_osc/ode.hpp"
#include "relay_osc/relay_dynamics.hpp"

namespace relay_osc {

struct SwitchSpeeds {
  double rho_minus = 0.0;  // C (A x - s B), s the incoming relay sign
  double rho_plus = 0.0;   // C (A x + s B)
};

struct OrbitCandidate {
  double half_period = 0.0;
  Vector anchor;
  bool is_symmetric_unimodal = false;
  double period = 0.0;
  double peak_output = 0.0;
  double min_sign_margin = 0.0;
  std::vector<SwitchSpeeds> switch_speeds;  // at the two switches of one period
};

struct OrbitSearchOptions {
  std::optional<double> tau_min;
  std::optional<double> tau_max;  // default 100 / sigma_slowest
  int grid_points = 2000;
  int sign_check_points = 10000;
};

struct OrbitSearch {
  std::vector<OrbitCandidate> candidates;  // ascending half-period
  std::optional<OrbitCandidate> best;      // smallest valid half-period
};

// Half-period equation g(tau) = C (e^{A tau} + I)^{-1} (e^{A tau} - I) A^{-1} B.
double half_period_function(const StateSpace& ss, double tau);

// Lists all candidates; throws kNoOrbit when none passes the sign condition.
OrbitSearch find_symmetric_orbits(const RelaySystem& system,
                                  const OrbitSearchOptions& options = {});
OrbitCandidate find_symmetric_orbit(const RelaySystem& system,
                                    const OrbitSearchOptions& options = {});

struct MonodromyReport {
  Matrix matrix;
  std::vector<Complex> floquet_multipliers;
  double det = 0.0;
  double det_limit_formula = 0.0;  // exp(-a_{n-1} T - b_{n-1} sum (|rho-|+|rho+|)/|rho- rho+|)
  double det_exact_limit = 0.0;    // exp(-a_{n-1} T) prod rho+/rho-
  double trivial_multiplier_error = 0.0;
};

// Switch-jump model used by monodromy_exact.
enum class JumpModel {
  kSaltation,      // I + 2 s B C / rho-, the gamma -> infinity limit of the smooth flow
  kReciprocalSum,  // I - B C (1 - exp(-b (1/|rho-| + 1/|rho+|))) / b
};

Matrix switch_jump(const StateSpace& ss, const SwitchSpeeds& speeds, int incoming_sign,
                   JumpModel model);

double det_limit_formula(double a_last, double b_last, double period,
                         const std::vector<SwitchSpeeds>& speeds);

MonodromyReport monodromy_exact(const OrbitCandidate& orbit, const StateSpace& ss,
                                JumpModel model = JumpModel::kSaltation);

// ([I - BC T/(pi M_peak)] e^{AT/2})^2
MonodromyReport monodromy_sinusoid(const OrbitCandidate& orbit, const StateSpace& ss);

struct FloquetOptions {
  OdeOptions ode{.rel_tol = 1e-10, .abs_tol = 1e-12};
  double shooting_tol = 1e-9;
  int max_newton = 40;
  double continuation_start = 1e2;
};

struct FloquetReport {
  MonodromyReport monodromy;
  double gamma = 0.0;
  Vector anchor;  // on C z = 0 with C z increasing
  double period = 0.0;
  double liouville_det = 0.0;  // exp of the integrated trace
  double closure_error = 0.0;
  int shooting_iterations = 0;
};

// Periodic orbit of z' = A z - B tanh(gamma C z) near the relay orbit, with its
// monodromy matrix. Continues in gamma by decades from continuation_start.
FloquetReport monodromy_floquet(const StateSpace& ss, double gamma,
                                const OrbitCandidate& orbit_hint,
                                const FloquetOptions& options = {});

struct OrbitSample {
  double t;
  Vector x;
  int u;
  double y;
};

std::vector<OrbitSample> orbit_samples(const OrbitCandidate& orbit, const RelaySystem& system,
                                       int points_per_half);

}  // namespace relay_osc
