#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tnt {

/// Precondition violated by a caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for every failure that comes out of a numerical procedure rather
/// than from bad input. The CLI maps these to a dedicated exit code.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceFailure : public NumericalError {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : NumericalError(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class IntegrationFailure : public NumericalError {
 public:
  IntegrationFailure(const std::string& what, std::size_t trajectory)
      : NumericalError(what + " (trajectory " + std::to_string(trajectory) + ")"),
        trajectory_(trajectory) {}
  std::size_t trajectory() const noexcept { return trajectory_; }

 private:
  std::size_t trajectory_;
};

class StepSizeError : public NumericalError {
 public:
  StepSizeError(const std::string& what, double drift)
      : NumericalError(what + " (relative norm drift " + std::to_string(drift) + ")"),
        drift_(drift) {}
  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

/// <J_x> is statistically indistinguishable from zero, so xi is undefined.
class UndefinedSqueezing : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tnt
