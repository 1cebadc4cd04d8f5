#pragma once

#include <stdexcept>
#include <string>

namespace faultline {

// Bad input data or a violated operation precondition.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stencil geometry admits no polynomially exact formula.
class SingularConstraints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDenominator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooFewPoints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace faultline
