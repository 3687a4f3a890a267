#include "vortexlab/error.hpp"

namespace vortexlab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::OutOfValidityRange: return "OutOfValidityRange";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ResolutionGuard: return "ResolutionGuard";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::EigensolveFailure: return "EigensolveFailure";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace vortexlab
