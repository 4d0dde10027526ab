#pragma once

#include <stdexcept>
#include <string>

namespace pairstat {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or invalid inputs: mismatched grids, bad mode specs, bad flags.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function (non-finite z, t <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Probability escaped past the truncated domain by more than the budget.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double leaked)
      : Error(what), leaked_(leaked) {}

  double leaked() const noexcept { return leaked_; }

 private:
  double leaked_;
};

// Evaluation point sits on a pole of a closed-form expression.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairstat
