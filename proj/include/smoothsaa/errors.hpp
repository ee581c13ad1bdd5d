#pragma once

#include <stdexcept>
#include <string>

namespace smoothsaa {

/// Numerical failure: a non-finite objective value, a divergent iteration or
/// a solver that could not produce a finite answer.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or command line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smoothsaa
