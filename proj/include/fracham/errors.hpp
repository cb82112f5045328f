#pragma once

#include <stdexcept>
#include <string>

namespace fracham {

/// Raised when a configuration file or parameter set is malformed.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a function handed to a spectral routine does not decay at the
/// ends of its grid, so periodification would contaminate the result.
class DecayError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when the structural hypotheses on W or L are violated.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: bracket expansion, line-search underflow, singular
/// Gram matrix, truncation boundary too close.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fracham
