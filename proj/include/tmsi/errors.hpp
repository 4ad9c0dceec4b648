#pragma once

#include <stdexcept>
#include <string>

namespace tmsi {

/// Input outside the mathematical domain of an operation (L = 0, ω ≤ 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The linearized model is evaluated at or above the oscillation threshold.
class ThresholdError : public std::runtime_error {
 public:
  explicit ThresholdError(const std::string& what)
      : std::runtime_error("at/above threshold: " + what) {}
};

/// Phase sensitivity has no finite value (vanishing signal slope).
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tmsi
