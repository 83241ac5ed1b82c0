#pragma once

#include <stdexcept>
#include <string>

namespace newton {

/// Structured failure codes shared across the library. Each maps onto a CLI
/// exit class: usage/parse errors (2), numerical failures (3), invariant
/// violations (1).
enum class ErrorCode {
  ParseError,
  InvalidArgument,
  RootFindingDiverged,
  PointOnCurve,
  ResidualTooLarge,
  FixedPointOnCurve,
  ZeroOnCurve,
  NotIndependent,
  ComponentNotInside,
  WindowExcludesRoots,
  ResolutionTooCoarse,
  UndecidedPixel,
  MultipleRootUnsupported,
  OrbitEscapedComponent,
  ContinuationStalled,
  BranchJump,
  NotConverged,
  RealizationNotSimple,
  HypothesisViolated,
  LandingUnresolved,
  CapExceeded,
  IterationDiverged,
  OrbitHitsGraph,
  BudgetExceeded,
  InvariantViolation,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

  /// CLI exit class for this failure.
  int exit_code() const {
    switch (code_) {
      case ErrorCode::ParseError:
      case ErrorCode::InvalidArgument:
        return 2;
      case ErrorCode::InvariantViolation:
        return 1;
      default:
        return 3;
    }
  }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RootFindingDiverged: return "RootFindingDiverged";
    case ErrorCode::PointOnCurve: return "PointOnCurve";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::FixedPointOnCurve: return "FixedPointOnCurve";
    case ErrorCode::ZeroOnCurve: return "ZeroOnCurve";
    case ErrorCode::NotIndependent: return "NotIndependent";
    case ErrorCode::ComponentNotInside: return "ComponentNotInside";
    case ErrorCode::WindowExcludesRoots: return "WindowExcludesRoots";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::UndecidedPixel: return "UndecidedPixel";
    case ErrorCode::MultipleRootUnsupported: return "MultipleRootUnsupported";
    case ErrorCode::OrbitEscapedComponent: return "OrbitEscapedComponent";
    case ErrorCode::ContinuationStalled: return "ContinuationStalled";
    case ErrorCode::BranchJump: return "BranchJump";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::RealizationNotSimple: return "RealizationNotSimple";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::LandingUnresolved: return "LandingUnresolved";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::IterationDiverged: return "IterationDiverged";
    case ErrorCode::OrbitHitsGraph: return "OrbitHitsGraph";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "UnknownError";
}

}  // namespace newton
