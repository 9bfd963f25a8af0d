#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace obsdict {

// Stable numbering: these values are mirrored by obsd_status in obsdict.h.
enum class ErrorCode : int {
  kParse = 1,
  kSchema = 2,
  kInvariant = 3,
  kDimensionMismatch = 4,
  kNonFinite = 5,
  kOverflow = 6,
  kNotDiagonalizable = 7,
  kQuadrature = 8,
  kTailNotCertifiable = 9,
  kConvergence = 10,
  kNotApplicable = 11,
  kNotObservable = 12,
  kDomain = 13,
  kGuardViolation = 14,
  kNotSelfAdjoint = 15,
  kNotStronglyStable = 16,
  kIo = 17,
  kInvalidArgument = 18,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(C, what) {}
};

using ParseError = TypedError<ErrorCode::kParse>;
using InvariantError = TypedError<ErrorCode::kInvariant>;
using DimensionMismatchError = TypedError<ErrorCode::kDimensionMismatch>;
using NonFiniteError = TypedError<ErrorCode::kNonFinite>;
using OverflowError = TypedError<ErrorCode::kOverflow>;
using QuadratureError = TypedError<ErrorCode::kQuadrature>;
using TailNotCertifiableError = TypedError<ErrorCode::kTailNotCertifiable>;
using ConvergenceError = TypedError<ErrorCode::kConvergence>;
using NotApplicableError = TypedError<ErrorCode::kNotApplicable>;
using NotObservableError = TypedError<ErrorCode::kNotObservable>;
using DomainError = TypedError<ErrorCode::kDomain>;
using NotSelfAdjointError = TypedError<ErrorCode::kNotSelfAdjoint>;
using NotStronglyStableError = TypedError<ErrorCode::kNotStronglyStable>;
using IoError = TypedError<ErrorCode::kIo>;
using InvalidArgumentError = TypedError<ErrorCode::kInvalidArgument>;

/// Schema violation in an input document; `pointer()` is a JSON pointer.
class SchemaError : public TypedError<ErrorCode::kSchema> {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : TypedError(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class NotDiagonalizableError : public TypedError<ErrorCode::kNotDiagonalizable> {
 public:
  NotDiagonalizableError(double condition, const std::string& what)
      : TypedError(what), condition_(condition) {}
  double condition_number() const { return condition_; }

 private:
  double condition_;
};

class GuardViolationError : public TypedError<ErrorCode::kGuardViolation> {
 public:
  GuardViolationError(std::vector<std::size_t> indices, const std::string& what)
      : TypedError(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

}  // namespace obsdict
