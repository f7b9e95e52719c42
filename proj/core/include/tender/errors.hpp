#pragma once

#include <stdexcept>
#include <string>

namespace tender {

// Root of every exception the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of a model
// (e.g. fewer than one tender car).
class DomainError : public Error {
 public:
  using Error::Error;
};

// No train configuration satisfies the payload constraint.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent user-supplied input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unknown key in a bundled table; the message lists the valid keys.
class LookupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// An analytic certificate came out with the wrong sign.
class ModelViolation : public Error {
 public:
  using Error::Error;
};

// Two algebraic routes to the same quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace tender
