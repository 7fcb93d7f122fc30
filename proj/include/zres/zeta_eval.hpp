#pragma once

// Derivatives of the Riemann zeta function: the truncated Dirichlet
// polynomial with its explicit error model, and an independent
// Euler-Maclaurin reference evaluator.

#include <complex>
#include <cstdint>
#include <vector>

#include "zres/core_params.hpp"

namespace zres {

struct ZetaSample {
  double sigma = 0;
  double t = 0;
  int j = 0;
  std::complex<double> value;
  double error_bound = 0;
  /// False when the sample was forced outside t in [T, 2T].
  bool rigorous = true;
};

/// Shipped implied constant of the truncation error model: twice the
/// largest residual ratio seen by calibrate_lemma1_constant() over the
/// default sweep (observed max 0.5228, see tests/test_zeta_eval.cpp).
inline constexpr double kLemma1Constant = 1.0456;

/// sum_{n<=T} (log n)^j n^{-sigma-it}, ascending n, compensated.
std::complex<double> dirichlet_partial_sum(int j, double sigma, double t, std::int64_t truncation,
                                           int precision_bits = 53);

/// C * j!/eps^j * T^{-sigma+eps}.
double truncation_error_bound(int j, double sigma, std::int64_t truncation, double epsilon,
                              double constant);

/// zeta^{(j)}(sigma+it) as (-1)^j times the Dirichlet partial sum of length
/// config.truncation. Rejects t outside [T, 2T] unless `force` is set, in
/// which case the sample is marked non-rigorous.
ZetaSample zeta_derivative_approx(int j, double sigma, double t, const EvalConfig& config,
                                  bool force = false);

struct ReferenceValue {
  std::complex<double> value;
  /// Certified bound on the Euler-Maclaurin remainder (rounding excluded).
  double remainder_bound = 0;
  std::int64_t cutoff = 0;
  int corrections = 0;
};

/// zeta^{(j)}(sigma+it) by Euler-Maclaurin summation, differentiated in s
/// term by term, accurate to 2^{-precision_bits/2}. Requires sigma > 0, j <= 8
/// and s != 1. Throws PrecisionUnattainable when the accuracy cannot be
/// certified.
ReferenceValue zeta_derivative_ref_detailed(int j, double sigma, double t, int precision_bits = 53);

std::complex<double> zeta_derivative_ref(int j, double sigma, double t, int precision_bits = 53);

struct SecondMoment {
  /// (1/T) * integral_0^T |zeta^{(j)}(sigma+it)|^2 dt
  double mean = 0;
  /// |zeta^{(2j)}(2 sigma)|
  double predicted = 0;
  int panels = 0;
};

/// Composite 5-point Gauss-Legendre over `samples` panels, doubled until two
/// successive levels agree to 1e-7 relative. Throws QuadratureFailure after
/// four doublings.
SecondMoment continuous_second_moment(int j, double sigma, double big_t, int samples);

/// |approx - ref| divided by the constant-free error model j!/eps^j T^{-sigma+eps}.
double lemma1_residual_ratio(int j, double sigma, double t, const EvalConfig& config);

struct Lemma1Sweep {
  std::vector<double> sigmas{0.6, 0.75, 0.9, 1.2};
  std::vector<int> orders{0, 1, 2, 3};
  std::vector<std::int64_t> truncations{1000, 10000};
  /// Points per (sigma, j, T), spread uniformly over [T, 2T] including both ends.
  int points = 17;
  double epsilon = 0.1;
};

/// Largest residual ratio over the sweep.
double calibrate_lemma1_constant(const Lemma1Sweep& sweep);

struct Lemma1Suite {
  int cases = 0;
  int passed = 0;
  /// Largest |approx - ref| / error_bound seen.
  double worst_ratio = 0;
};

/// Random cases sigma in [0.6, 1.2], j in {0..3}, T in {10^3, 10^4},
/// t in [T, 2T], each checked against the bound with `constant`.
Lemma1Suite lemma1_random_suite(int cases = 200, std::uint64_t seed = 1,
                                double constant = kLemma1Constant);

}  // namespace zres
