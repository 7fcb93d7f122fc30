#pragma once

#include <stdexcept>
#include <string>

namespace zres {

/// Argument outside the domain of a formula (non-positive iterated log,
/// sigma outside the strip, and similar).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested accuracy cannot be certified with the available precision.
class PrecisionUnattainable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration, scan or refinement loop ran past its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature failed to converge or a tail could not be bounded.
class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zres
