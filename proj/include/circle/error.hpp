#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circle {

enum class ErrorKind {
  NotMonotone,
  NoConvergence,
  RationalDetected,
  GammaUnderflow,
  TooShort,
  ResonantDivisor,
  CutoffTooSmall,
  ResidualTooLarge,
  NotPositive,
  OutOfDomain,
  PreconditionFailed,
  NotFound,
  GateRejected,
  LipBudgetExceeded,
  DivisorFailure,
  EpsTooLarge,
  NoSignChange,
  TaylorUnstable,
  OrderBlowup,
  NoRoot,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the sweep driver in particular) can record it per cell.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace circle
