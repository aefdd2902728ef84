#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcr {

enum class ErrorCode {
  InputError,
  DegenerateSemiNorm,
  StencilOutOfDomain,
  ImageOutsideDomain,
  GridTooSmall,
  OrientationViolation,
  DegenerateDerivative,
  SupportTooClose,
  NoConvergence,
  CoefficientTooLarge,
  NewtonDiverged,
  PointOutsideImage,
  SearchExhausted,
  PipelineBudgetExceeded,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status and a machine-parsable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for input/format problems, false for numerical failures.
  bool is_input_error() const noexcept { return code_ == ErrorCode::InputError; }

 private:
  ErrorCode code_;
};

}  // namespace qcr
