#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skewmix {

/// Argument outside the domain where an operation is defined
/// (log at the cut locus, Re z outside the operating strip, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested enumeration would exceed a declared size limit.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Observable and operator live on different isotypic components.
class IrrepMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver ran out of budget. Carries the residual history.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

/// Too few usable points to fit a decay rate.
class InsufficientSignal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skewmix
