#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vortexlab {

enum class ErrorKind {
  InvalidParameter,
  OutOfValidityRange,
  QuadratureFailure,
  ResolutionGuard,
  GridMismatch,
  NewtonDiverged,
  NotPositive,
  NotConverged,
  EigensolveFailure,
  LinearSolveFailure,
  InsufficientData,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` carries the failure class so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace vortexlab
