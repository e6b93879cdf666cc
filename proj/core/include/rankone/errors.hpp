#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankone {

enum class FailureKind {
  StepSizeUnderflow,
  NoReturn,
  LeftDomain,
  DegenerateCrossing,
  NotASaddle,
  NewtonDivergence,
  NoLoop,
  DegenerateSample,
  InsufficientTail,
  WindowTooShort,
  H2Violation,
  SignError,
  ContinuationBroken,
  InvalidInput,
};

std::string_view to_string(FailureKind kind);

/// A numerical computation could not produce a trustworthy result.
/// `witness` carries the last good state or the offending values.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(FailureKind kind, const std::string& what, std::vector<double> witness = {})
      : std::runtime_error(what), kind_(kind), witness_(std::move(witness)) {}

  FailureKind kind() const noexcept { return kind_; }
  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  FailureKind kind_;
  std::vector<double> witness_;
};

}  // namespace rankone
