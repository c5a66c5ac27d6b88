#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relay_osc/ode.hpp"
#include "relay_osc/plant.hpp"

namespace relay_osc {

struct SfsConfig {
  double gamma = 1.0;
  OdeOptions ode{};
};

// z' = A z - B tanh(gamma C z)
void sfs_field(const StateSpace& ss, double gamma, const Vector& z, Vector& dz);

DenseTrajectory simulate_sfs(const StateSpace& ss, const SfsConfig& cfg, const Vector& x0,
                             double t_end);

Matrix linearization(const StateSpace& ss, double gamma);  // A - gamma B C

// Coefficients c_0..c_n of lambda^n + sum (a_i + gamma b_i) lambda^i.
std::vector<double> closed_loop_polynomial(const StateSpace& ss, double gamma);

enum class CrossingKind { kHopf, kPitchfork };

struct Crossing {
  double gamma0 = 0.0;
  double omega0 = 0.0;
  int direction = 0;  // +1 when eigenvalues move into the right half-plane
  bool odd_multiplicity = true;
  CrossingKind kind = CrossingKind::kHopf;
};

struct RootLocusScan {
  std::vector<double> gamma_grid;
  std::vector<std::vector<Complex>> eigen_tracks;  // per gamma, continued by nearest neighbour
  std::vector<Crossing> crossings;
};

RootLocusScan root_locus(const StateSpace& ss, double gamma_max = 1e3, int points = 400,
                         double gamma_min = 1e-2);

enum class HopfKind { kSupercritical, kSubcritical, kUndetermined };

struct HopfEvidence {
  double delta = 0.0;
  double gamma = 0.0;
  double amplitude = 0.0;  // late-time peak |C z|
  std::string outcome;     // "oscillation", "decay", "escape", "equilibrium"
};

struct HopfReport {
  double gamma0 = 0.0;
  double omega0 = 0.0;
  HopfKind kind = HopfKind::kUndetermined;
  std::vector<double> pitchfork_gammas;
  std::vector<HopfEvidence> evidence;
};

struct HopfOptions {
  double initial_norm = 1e-3;
  double settle_periods = 400.0;
  double measure_periods = 20.0;
  OdeOptions ode{.rel_tol = 1e-9, .abs_tol = 1e-13};
};

// Throws kNoOscillatoryCrossing.
HopfReport hopf_classify(const StateSpace& ss, const RootLocusScan& scan,
                         const HopfOptions& options = {});

struct DescribingLocus {
  double omega = 0.0;
  double gamma = 0.0;
  std::vector<double> theta_grid;
  std::vector<Complex> l_values;
  Complex direction;        // d L / d theta^2 = gamma^2 G(j omega) / 4
  Complex nyquist_tangent;  // d (gamma G(j w)) / d w
  double sin_angle = 0.0;
  bool tangential = false;
};

// Throws kPoleOnAxis.
DescribingLocus describing_locus(const StateSpace& ss, double omega, double gamma,
                                 double theta_max, int points);

struct HyperbolicityResult {
  bool hyperbolic = false;
  std::optional<double> witness;  // kappa with A - kappa B C not Hurwitz
  double min_margin = 0.0;        // min over the grid of -max Re lambda
  int grid_points = 0;
};

HyperbolicityResult hyperbolicity_check(const StateSpace& ss, double gamma_max,
                                        int samples = 2000);

// argmax and max of z / cosh^2 z, z > 0.
struct EnvelopeConstant {
  double argmax = 0.0;
  double value = 0.0;
};
EnvelopeConstant sech2_envelope_constant();

}  // namespace relay_osc
