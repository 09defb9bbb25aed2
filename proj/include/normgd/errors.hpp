#pragma once

#include <stdexcept>
#include <string>

namespace normgd {

// Bad shapes, out-of-domain arguments, invalid configurations.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Closed forms that only exist for theta* = 0 were asked for something else.
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative numerical routine failed to meet its own convergence test.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by a NormGD step when lambda_max of the sample Hessian sits at or
// below the curvature floor. Carries the offending value for diagnostics.
class DegenerateCurvature : public NumericalError {
 public:
  DegenerateCurvature(double lambda, double floor)
      : NumericalError("degenerate curvature: lambda_max = " + std::to_string(lambda) +
                       " <= floor " + std::to_string(floor)),
        lambda_(lambda),
        floor_(floor) {}

  double lambda() const noexcept { return lambda_; }
  double floor() const noexcept { return floor_; }

 private:
  double lambda_;
  double floor_;
};

}  // namespace normgd
