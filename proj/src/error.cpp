#include "gmink/error.hpp"

namespace gmink {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::NotConvex: return "not convex";
    case ErrorCode::CoverageFailure: return "coverage failure";
    case ErrorCode::HemisphereViolation: return "hemisphere violation";
    case ErrorCode::NoAdmissibleConstant: return "no admissible constant solution";
    case ErrorCode::NewtonStall: return "newton stall";
    case ErrorCode::LeftBranch: return "left branch";
    case ErrorCode::ConvexityLoss: return "convexity loss";
    case ErrorCode::MassTooLarge: return "mass too large";
    case ErrorCode::HomotopyFailure: return "homotopy failure";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Io: return "io error";
  }
  return "unknown";
}

}  // namespace gmink
