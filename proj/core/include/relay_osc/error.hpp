#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relay_osc {

enum class ErrorCode {
  kInvalidPlant,
  kInvalidArgument,
  kOverflow,
  kNoCrossing,
  kQuiescent,
  kNonDiagonalizable,
  kNonTransversal,
  kStepUnderflow,
  kEmptySet,
  kEscapedSet,
  kNoOrbit,
  kDegenerateSpeed,
  kShootingDiverged,
  kNoOscillatoryCrossing,
  kPoleOnAxis,
  kNotHurwitz,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relay_osc
