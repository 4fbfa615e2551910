#ifndef BIGJUMP_ERRORS_HPP
#define BIGJUMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bigjump {

// Error codes for every failure mode the library reports.  Tests match on
// the code, messages are for humans.
enum class ErrorCode {
  MeanInfinite,
  InvalidProbability,
  UnderflowAtLevel,
  DiscretizationTooCoarse,
  NonPositiveLevel,
  NonPositiveThreshold,
  NotIrreducible,
  CycleLengthCap,
  NonNegativeDrift,
  StepCapExceeded,
  HorizonCapExceeded,
  GridTooShort,
  GridTooCoarse,
  PeriodicModulator,
  NoFiniteCutoff,
  EpsilonOutOfRange,
  FamilyConstraintViolated,
  ParameterInequalityViolated,
  ConfigInvalid,
  BadParameter,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace bigjump

#endif
