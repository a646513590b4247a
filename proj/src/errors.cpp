#include "homcell/errors.hpp"

namespace homcell {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kIntegrationFailure: return "IntegrationFailure";
    case ErrorCode::kFixedPointOnCurve: return "FixedPointOnCurve";
    case ErrorCode::kRefinementExhausted: return "RefinementExhausted";
    case ErrorCode::kNotIsolated: return "NotIsolated";
    case ErrorCode::kNoInverse: return "NoInverse";
    case ErrorCode::kNotASaddle: return "NotASaddle";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kLeftWorkingRectangle: return "LeftWorkingRectangle";
    case ErrorCode::kDegenerateLoop: return "DegenerateLoop";
    case ErrorCode::kAmbiguousSign: return "AmbiguousSign";
    case ErrorCode::kHypothesisUnmet: return "HypothesisUnmet";
    case ErrorCode::kChartInconsistency: return "ChartInconsistency";
    case ErrorCode::kNoHomoclinicPoint: return "NoHomoclinicPoint";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

bool is_certification_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFixedPointOnCurve:
    case ErrorCode::kRefinementExhausted:
    case ErrorCode::kNotIsolated:
    case ErrorCode::kAmbiguousSign:
    case ErrorCode::kDegenerateLoop:
    case ErrorCode::kNoHomoclinicPoint:
    case ErrorCode::kIntegrationFailure:
    case ErrorCode::kLeftWorkingRectangle:
    case ErrorCode::kNoInverse:
    case ErrorCode::kNotASaddle:
      return true;
    default:
      return false;
  }
}

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& message)
    : Error(ErrorCode::kParse, message), offset_(offset), expected_(std::move(expected)) {}

}  // namespace homcell
