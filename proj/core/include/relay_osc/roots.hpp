#pragma once

#include <functional>
#include <optional>

namespace relay_osc {

struct RootBracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

struct RootOptions {
  double x_tol_rel = 1e-12;  // bracket width < x_tol_rel * max(1, |t|)
  double f_tol = 1e-12;
  int max_iter = 200;
};

using ScalarFunction = std::function<double(double)>;

double refine_root(const ScalarFunction& f, const RootBracket& bracket,
                   const RootOptions& options = {});

// Marches from t_start by step until f changes sign. departure_sign fixes the
// sign of f just after t_start when f(t_start) == 0; 0 means "infer it from
// the first sample".
std::optional<RootBracket> march_to_sign_change(const ScalarFunction& f, double t_start,
                                                double t_max, double step,
                                                int departure_sign = 0);

// First zero crossing of f in (t_start, t_max]. Throws kNoCrossing.
double find_first_root(const ScalarFunction& f, double t_start, double t_max,
                       double step_hint, const RootOptions& options = {},
                       int departure_sign = 0);

}  // namespace relay_osc
