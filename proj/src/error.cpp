#include "circle/error.hpp"

namespace circle {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::RationalDetected: return "RationalDetected";
    case ErrorKind::GammaUnderflow: return "GammaUnderflow";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::ResonantDivisor: return "ResonantDivisor";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::GateRejected: return "GateRejected";
    case ErrorKind::LipBudgetExceeded: return "LipBudgetExceeded";
    case ErrorKind::DivisorFailure: return "DivisorFailure";
    case ErrorKind::EpsTooLarge: return "EpsTooLarge";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::TaylorUnstable: return "TaylorUnstable";
    case ErrorKind::OrderBlowup: return "OrderBlowup";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace circle
