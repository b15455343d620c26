#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cframe {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotHermitian,
  NoConvergence,
  DuplicateNodes,
  NotAFrame,
  ZeroTuple,
  AmbientTooSmall,
  ComponentsNotFree,
  NotInIntersection,
  InsufficientCodimension,
  NotIndependent,
  WitnessNotFrame,
  ZeroForm,
  ZeroTarget,
  HypothesisViolated,
  FieldMismatch,
  PreconditionResidual,
  ResidualTooLarge,
  VerificationFailed,
  MalformedInput,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DuplicateNodes: return "DuplicateNodes";
    case ErrorCode::NotAFrame: return "NotAFrame";
    case ErrorCode::ZeroTuple: return "ZeroTuple";
    case ErrorCode::AmbientTooSmall: return "AmbientTooSmall";
    case ErrorCode::ComponentsNotFree: return "ComponentsNotFree";
    case ErrorCode::NotInIntersection: return "NotInIntersection";
    case ErrorCode::InsufficientCodimension: return "InsufficientCodimension";
    case ErrorCode::NotIndependent: return "NotIndependent";
    case ErrorCode::WitnessNotFrame: return "WitnessNotFrame";
    case ErrorCode::ZeroForm: return "ZeroForm";
    case ErrorCode::ZeroTarget: return "ZeroTarget";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::PreconditionResidual: return "PreconditionResidual";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Error raised by every fallible operation in the library.
///
/// `clause()` names the violated hypothesis or precondition in a short,
/// stable form so callers (and the CLI) can report it verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string clause, const std::string& detail = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + clause +
                           (detail.empty() ? "" : " (" + detail + ")")),
        code_(code),
        clause_(std::move(clause)),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& clause() const noexcept { return clause_; }
  const std::string& detail() const noexcept { return detail_; }

  /// True for failures of a mathematical hypothesis, as opposed to
  /// malformed input or numerical breakdown.
  bool is_hypothesis_failure() const noexcept {
    switch (code_) {
      case ErrorCode::NotAFrame:
      case ErrorCode::ZeroTuple:
      case ErrorCode::AmbientTooSmall:
      case ErrorCode::ComponentsNotFree:
      case ErrorCode::NotInIntersection:
      case ErrorCode::InsufficientCodimension:
      case ErrorCode::NotIndependent:
      case ErrorCode::WitnessNotFrame:
      case ErrorCode::ZeroForm:
      case ErrorCode::ZeroTarget:
      case ErrorCode::HypothesisViolated:
      case ErrorCode::FieldMismatch:
      case ErrorCode::PreconditionResidual:
      case ErrorCode::ResidualTooLarge:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
  std::string clause_;
  std::string detail_;
};

}  // namespace cframe
