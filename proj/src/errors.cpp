#include "bigjump/errors.hpp"

namespace bigjump {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MeanInfinite: return "MeanInfinite";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::UnderflowAtLevel: return "UnderflowAtLevel";
    case ErrorCode::DiscretizationTooCoarse: return "DiscretizationTooCoarse";
    case ErrorCode::NonPositiveLevel: return "NonPositiveLevel";
    case ErrorCode::NonPositiveThreshold: return "NonPositiveThreshold";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::CycleLengthCap: return "CycleLengthCap";
    case ErrorCode::NonNegativeDrift: return "NonNegativeDrift";
    case ErrorCode::StepCapExceeded: return "StepCapExceeded";
    case ErrorCode::HorizonCapExceeded: return "HorizonCapExceeded";
    case ErrorCode::GridTooShort: return "GridTooShort";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::PeriodicModulator: return "PeriodicModulator";
    case ErrorCode::NoFiniteCutoff: return "NoFiniteCutoff";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::FamilyConstraintViolated: return "FamilyConstraintViolated";
    case ErrorCode::ParameterInequalityViolated: return "ParameterInequalityViolated";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::BadParameter: return "BadParameter";
  }
  return "UnknownError";
}

}  // namespace bigjump
