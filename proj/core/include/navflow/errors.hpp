#pragma once

#include <stdexcept>
#include <string>

namespace navflow {

// Argument shapes disagree (vector length vs. world dimension, etc.).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point is outside the set on which a function is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent input data (world files, configurations).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative procedure failed to converge or hit a singular system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Random generation could not satisfy its acceptance rules in budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace navflow
