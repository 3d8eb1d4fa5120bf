#include "swlb/error.hpp"

namespace swlb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateDraw: return "DegenerateDraw";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
    case ErrorCode::TooFewDraws: return "TooFewDraws";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDraw:
    case ErrorCode::Separation:
    case ErrorCode::NonConvergence:
    case ErrorCode::DegenerateVariance:
    case ErrorCode::SingularInformation:
    case ErrorCode::TooManyFailures:
    case ErrorCode::TooFewDraws:
      return true;
    default:
      return false;
  }
}

}  // namespace swlb
