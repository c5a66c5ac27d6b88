#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "relay_osc/bounds.hpp"
#include "relay_osc/relay_dynamics.hpp"

namespace relay_osc {

struct JacobianPair {
  Matrix astrom;
  Matrix exact;
  Vector u;  // field at the landing point
  Vector v;  // field at the start point
  double tau = 0.0;
  Vector image;
};

// (I - u C / (C u)) e^{A tau}
Matrix astrom_jacobian(const Matrix& e_at, const Vector& u, const RowVector& c);
// astrom (I - v v^T / (v^T v))
Matrix exact_jacobian(const Matrix& astrom, const Vector& v);

// Derivative of psi_+(.;1) at x on the switching plane. Throws kNonTransversal.
JacobianPair jacobians(const RelaySystem& system, const Vector& x);

struct ChainedJacobian {
  Matrix astrom;
  Matrix exact;
  Vector image;  // psi_+(x;k)
  std::vector<JacobianPair> factors;
};

// J(x_{k-1}) (-I) ... (-I) J(x_0) along the k-switch chain.
ChainedJacobian chained_jacobians(const RelaySystem& system, const Vector& x, int k);

struct SpectralSample {
  std::size_t point_id = 0;
  Vector point;
  double rho_astrom = 0.0;
  double rho_exact = 0.0;
  double norm_astrom = 0.0;
  double norm_exact = 0.0;
  double bauer_fike_astrom = 0.0;
  double bauer_fike_exact = 0.0;
  bool schur_stable = false;
};

struct SpectralSurvey {
  std::vector<SpectralSample> samples;  // ordered by point_id
  std::size_t skipped = 0;
  double schur_stable_fraction() const;
};

struct SurveyOptions {
  unsigned threads = 0;  // 0 reads RELAY_OSC_THREADS, else hardware concurrency
};

SpectralSurvey spectral_survey(const RelaySystem& system, const SetD& d, std::size_t count,
                               int k, std::uint64_t seed, const SurveyOptions& options = {});

struct FixedPointOptions {
  int max_iter = 200;
  double tol = 1e-11;         // relative to max(1, ||x||)
  double stall_ratio = 0.9;   // Picard step counted as stalled above this residual ratio
  int stall_patience = 3;
  bool newton_only = false;
};

struct FixedPointResult {
  Vector x_hat;
  int k = 1;
  double residual = 0.0;
  int iterations_used = 0;
  bool converged = false;
  bool used_newton = false;
  std::vector<double> residual_history;
};

// Fixed point of -psi_+(.;k). Throws kEscapedSet when an iterate leaves D.
FixedPointResult fixed_point_search(const RelaySystem& system, const SetD& d, int k,
                                    const Vector& x0, const FixedPointOptions& options = {});

}  // namespace relay_osc
