#include "qcr/errors.hpp"

namespace qcr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InputError: return "InputError";
    case ErrorCode::DegenerateSemiNorm: return "DegenerateSemiNorm";
    case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorCode::ImageOutsideDomain: return "ImageOutsideDomain";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::OrientationViolation: return "OrientationViolation";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::SupportTooClose: return "SupportTooClose";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::CoefficientTooLarge: return "CoefficientTooLarge";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::PointOutsideImage: return "PointOutsideImage";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::PipelineBudgetExceeded: return "PipelineBudgetExceeded";
  }
  return "Unknown";
}

}  // namespace qcr
