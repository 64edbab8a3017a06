#pragma once

#include <stdexcept>
#include <string>

namespace asymlab {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Infeasible,
  RejectionLimit,
  Diverged,
  Numerical,
  Schema,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base error for every failure raised by the library. The kind lets callers
/// (and the CLI) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a least-squares or span condition cannot be met; carries the
/// residual norm that was observed.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double residual)
      : Error(ErrorKind::Infeasible, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace asymlab
