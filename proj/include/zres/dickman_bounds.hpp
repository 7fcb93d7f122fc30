#pragma once

// Dickman function and the closed-form constants of the two large-value
// bounds: lambda(A), D_j(A) and Y_j = D_j(0).

#include <vector>

#include "zres/errors.hpp"

namespace zres {

/// rho(u) tabulated on the uniform grid u = i/steps_per_unit, 0 <= u <= u_max.
/// Grid points fall on every integer, so each step lies inside one interval
/// [k, k+1] on which rho is analytic.
class DickmanTable {
 public:
  /// Solves u rho(u) = int_{u-1}^{u} rho(v) dv implicitly, node by node, with
  /// 6-point interpolatory step rules kept inside each unit interval. The
  /// sum has no cancellation, so values stay relatively accurate as rho
  /// decays. A second table at half resolution provides the error estimate.
  static DickmanTable build(int u_max = 20, int steps_per_unit = 1024);

  /// Throws DomainError when u > u_max or u < 0.
  long double rho(long double u) const;

  double step() const { return 1.0 / steps_per_unit_; }
  int steps_per_unit() const { return steps_per_unit_; }
  int u_max() const { return u_max_; }
  const std::vector<long double>& values() const { return values_; }

  /// Largest estimated absolute error over the grid.
  double error_estimate() const { return max_error_; }
  /// Estimated absolute error near u (piecewise constant on double steps).
  long double error_near(long double u) const;

 private:
  static std::vector<long double> integrate(int u_max, int steps_per_unit);
  static long double interpolate(const std::vector<long double>& values, int steps_per_unit,
                                 long double u);

  int u_max_ = 0;
  int steps_per_unit_ = 0;
  std::vector<long double> values_;
  std::vector<long double> errors_;  // one entry per pair of steps
  double max_error_ = 0;
};

/// Shared, lazily built table with at least the given range and resolution.
const DickmanTable& dickman_table(int u_max = 20, int steps_per_unit = 1024);

/// rho(u) from the shared table, refined until its error estimate is below
/// table_accuracy. Throws DomainError ("extension required") for u > 20.
double dickman_rho(double u, double table_accuracy = 1e-13);

struct QuadratureResult {
  double value = 0;
  /// Step-halving difference + propagated table error + certified tail.
  double error = 0;
  double u_max = 0;
};

/// D_j(A) = int_0^inf e^{Au} u^j rho(u) du for 0 <= A <= 4.
/// Throws QuadratureFailure when the error estimate exceeds `accuracy`.
QuadratureResult d_j_of_A(int j, double a, double accuracy = 1e-10);

/// Y_j = int_0^inf u^j rho(u) du.
double y_j(int j, double accuracy = 1e-10);

/// 1 / (sqrt(2) (e - 1) e^A)
double lambda_of_A(double a);

}  // namespace zres
