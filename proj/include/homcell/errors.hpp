#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace homcell {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kDomain,
  kIntegrationFailure,
  kFixedPointOnCurve,
  kRefinementExhausted,
  kNotIsolated,
  kNoInverse,
  kNotASaddle,
  kOutOfRange,
  kLeftWorkingRectangle,
  kDegenerateLoop,
  kAmbiguousSign,
  kHypothesisUnmet,
  kChartInconsistency,
  kNoHomoclinicPoint,
  kConfig,
};

const char* error_code_name(ErrorCode code);

// Numerics could not certify a result (as opposed to bad input).
bool is_certification_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace homcell
