#pragma once

#include <stdexcept>
#include <string>

namespace mems {

// Invalid physical or numerical parameter (beta <= 0, bad kappa ordering, ...).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Mismatched dimensions or otherwise malformed call arguments.
class ArgumentError : public std::invalid_argument {
public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// The plate gap fell below the numerical touchdown threshold kappa_stop.
class TouchdownError : public std::runtime_error {
public:
  TouchdownError(const std::string& what, double time, double gap)
      : std::runtime_error(what), time_(time), gap_(gap) {}
  double time() const { return time_; }
  double gap() const { return gap_; }

private:
  double time_;
  double gap_;
};

// A state failed the admissible-set membership test required by the caller.
class AdmissibilityError : public std::runtime_error {
public:
  explicit AdmissibilityError(const std::string& what) : std::runtime_error(what) {}
};

// Linear algebra failure: singular system, eigensolver breakdown, ...
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Iteration did not converge within the allowed number of steps.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

private:
  int iterations_;
  double residual_;
};

}  // namespace mems
