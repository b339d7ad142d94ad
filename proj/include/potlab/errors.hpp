#pragma once

#include <stdexcept>
#include <string>

namespace potlab {

/// Malformed or unknown fields in a serialized object or configuration.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ensemble parameters violating beta*(s - N + 1) > 2 + c0 (or s <= N).
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method that did not reach its tolerance where the caller
/// asked for a hard failure.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace potlab
