#include "obsdict/errors.hpp"

namespace obsdict {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kInvariant: return "InvariantError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatchError";
    case ErrorCode::kNonFinite: return "NonFiniteError";
    case ErrorCode::kOverflow: return "OverflowError";
    case ErrorCode::kNotDiagonalizable: return "NotDiagonalizableError";
    case ErrorCode::kQuadrature: return "QuadratureError";
    case ErrorCode::kTailNotCertifiable: return "TailNotCertifiableError";
    case ErrorCode::kConvergence: return "ConvergenceError";
    case ErrorCode::kNotApplicable: return "NotApplicableError";
    case ErrorCode::kNotObservable: return "NotObservableError";
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kGuardViolation: return "GuardViolationError";
    case ErrorCode::kNotSelfAdjoint: return "NotSelfAdjointError";
    case ErrorCode::kNotStronglyStable: return "NotStronglyStableError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgumentError";
  }
  return "Error";
}

}  // namespace obsdict
