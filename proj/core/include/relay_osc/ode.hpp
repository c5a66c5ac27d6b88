#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "relay_osc/types.hpp"

namespace relay_osc {

using VectorField = std::function<void(double t, const Vector& x, Vector& dxdt)>;

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 picks 1e-3 * span
  double min_step = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;
  double sample_dt = 0.0;  // > 0 records a uniform grid from the dense output
};

// View of one accepted step. state_at is only valid inside the callback.
struct StepView {
  double t_prev;
  double t;
  const Vector& x;
  std::function<Vector(double)> state_at;
};

// Return true to stop the integration after this step.
using StepObserver = std::function<bool(const StepView&)>;

class DenseTrajectory {
 public:
  std::vector<double> step_times;   // accepted step ends, first entry t0
  std::vector<Vector> step_states;
  std::vector<Vector> step_slopes;
  std::vector<double> sample_times;  // uniform grid if sample_dt > 0
  std::vector<Vector> samples;
  bool stopped_early = false;

  double t_begin() const { return step_times.front(); }
  double t_end() const { return step_times.back(); }
  const Vector& final_state() const { return step_states.back(); }
  std::size_t num_steps() const { return step_times.size() - 1; }

  // Cubic Hermite interpolation between stored step ends.
  Vector operator()(double t) const;
};

// Dormand-Prince 5(4) with step control and dense output. Throws
// ErrorCode::kStepUnderflow when the step falls below min_step.
DenseTrajectory integrate_adaptive(const VectorField& rhs, const Vector& x0, double t0,
                                   double t1, const OdeOptions& options = {},
                                   const StepObserver& observer = {});

}  // namespace relay_osc
