#include "relay_osc/roots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "relay_osc/error.hpp"

namespace relay_osc {

namespace {

double checked(const ScalarFunction& f, double t) {
  const double v = f(t);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                "root search: non-finite function value at t = " + std::to_string(t));
  }
  return v;
}

}  // namespace

double refine_root(const ScalarFunction& f, const RootBracket& bracket,
                   const RootOptions& options) {
  if (bracket.f_lo == 0.0) return bracket.lo;
  if (bracket.f_hi == 0.0) return bracket.hi;
  if (bracket.f_lo * bracket.f_hi > 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "refine_root: bracket has no sign change");
  }
  const auto tol = [&](double a, double b) {
    return std::abs(b - a) <= options.x_tol_rel * std::max(1.0, std::abs(a));
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(options.max_iter);
  const auto fn = [&](double t) { return checked(f, t); };
  auto [a, b] = boost::math::tools::toms748_solve(fn, bracket.lo, bracket.hi, bracket.f_lo,
                                                  bracket.f_hi, tol, iters);
  // Return the endpoint with the smaller residual.
  const double fa = fn(a);
  const double fb = fn(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

std::optional<RootBracket> march_to_sign_change(const ScalarFunction& f, double t_start,
                                                double t_max, double step,
                                                int departure_sign) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "march: step must be positive");
  double t_prev = t_start;
  double f_prev = checked(f, t_start);
  int sign = f_prev > 0.0 ? 1 : (f_prev < 0.0 ? -1 : departure_sign);
  while (t_prev < t_max) {
    const double t = std::min(t_prev + step, t_max);
    const double ft = checked(f, t);
    if (sign == 0) {
      // On the root with unknown direction: the first nonzero sample fixes it.
      if (ft != 0.0) sign = ft > 0.0 ? 1 : -1;
    } else if (ft * sign <= 0.0) {
      if (f_prev == 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "root search: departs from the root against the expected direction");
      }
      return RootBracket{t_prev, t, f_prev, ft};
    }
    t_prev = t;
    f_prev = ft;
  }
  return std::nullopt;
}

double find_first_root(const ScalarFunction& f, double t_start, double t_max,
                       double step_hint, const RootOptions& options, int departure_sign) {
  const auto bracket = march_to_sign_change(f, t_start, t_max, step_hint, departure_sign);
  if (!bracket) {
    throw Error(ErrorCode::kNoCrossing, "no crossing before t = " + std::to_string(t_max));
  }
  return refine_root(f, *bracket, options);
}

}  // namespace relay_osc
