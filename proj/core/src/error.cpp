#include "relay_osc/error.hpp"

namespace relay_osc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidPlant: return "invalid_plant";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kNoCrossing: return "no_crossing";
    case ErrorCode::kQuiescent: return "quiescent";
    case ErrorCode::kNonDiagonalizable: return "non_diagonalizable";
    case ErrorCode::kNonTransversal: return "non_transversal";
    case ErrorCode::kStepUnderflow: return "step_underflow";
    case ErrorCode::kEmptySet: return "empty_set";
    case ErrorCode::kEscapedSet: return "escaped_set";
    case ErrorCode::kNoOrbit: return "no_orbit";
    case ErrorCode::kDegenerateSpeed: return "degenerate_speed";
    case ErrorCode::kShootingDiverged: return "shooting_diverged";
    case ErrorCode::kNoOscillatoryCrossing: return "no_oscillatory_crossing";
    case ErrorCode::kPoleOnAxis: return "pole_on_axis";
    case ErrorCode::kNotHurwitz: return "not_hurwitz";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace relay_osc
