#pragma once

#include <stdexcept>
#include <string>

namespace wirebus {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A documented precondition (e.g. the resonance condition) does not hold.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Iterative solver gave up; carries the last residual it saw.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    [[nodiscard]] double last_residual() const { return last_residual_; }

  private:
    double last_residual_;
};

/// A search found nothing in the requested region.
class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// Integrator or other floating-point failure.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Bad configuration value or document.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace wirebus
