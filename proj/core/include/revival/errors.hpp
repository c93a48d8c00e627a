#pragma once

#include <stdexcept>
#include <string>

namespace revival {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input outside the documented domain of an operation. The CLI maps the
/// whole family to exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoResonance : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integer Mathieu order: the a/b band-edge splitting is not modelled.
class DegenerateOrder : public DomainError {
 public:
  using DomainError::DomainError;
};

/// nu^2 = 1, where the second-order characteristic-value series diverges.
class SingularOrder : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Second derivative of the spectrum vanishes, so beta = 0.
class FlatSpectrum : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Level window too small for the requested packet.
class WindowError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Norm drift or truncation-edge leakage beyond tolerance. Exit code 3.
class IntegrationAccuracyError : public Error {
 public:
  IntegrationAccuracyError(const std::string& what, double suggested_dt);

  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Unusable analysis input (malformed or non-uniform trace). Exit code 4.
class AnalysisInputError : public Error {
 public:
  using Error::Error;
};

class TraceTooShort : public AnalysisInputError {
 public:
  using AnalysisInputError::AnalysisInputError;
};

}  // namespace revival
