#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace halfline {

enum class ErrorCode {
  SelfadjointnessViolated,
  RankDeficient,
  DimensionMismatch,
  NotHermitian,
  NonFiniteSample,
  AsymmetricGrid,
  BadBoundState,
  IntegrationFailure,
  NonFinite,
  SingularJost,
  ScanInconclusive,
  ClusterUnresolved,
  NotPositive,
  TailNotSettled,
  SingularOperator,
  TruncationTooShort,
  SpectralFailure,
  PhaseUnwrapFailure,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to a stable exit status.
class ScatteringError : public std::runtime_error {
 public:
  ScatteringError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace halfline
