#pragma once

#include <stdexcept>
#include <string>

namespace sfk {

// Invalid input to a geometric primitive (z <= 0, point outside the ball, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A field could not be evaluated at the requested location, e.g. a
// finite-difference stencil would cross z = 0.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double z, double x2, double x3)
      : std::runtime_error(what + " at (z=" + std::to_string(z) + ", x2=" + std::to_string(x2) +
                           ", x3=" + std::to_string(x3) + ")"),
        z_(z), x2_(x2), x3_(x3) {}
  double z() const { return z_; }
  double x2() const { return x2_; }
  double x3() const { return x3_; }

 private:
  double z_, x2_, x3_;
};

// Evaluation at (or numerically at) a charge point or on a Dirac string.
class PoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature did not reach its target; carries the error estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what + " (estimated error " + std::to_string(estimate) + ")"),
        estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sfk
