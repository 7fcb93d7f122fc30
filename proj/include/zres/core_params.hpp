#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "zres/errors.hpp"

namespace zres {

enum class SigmaMode { NearHalf, NearOne };

std::string to_string(SigmaMode mode);
SigmaMode parse_sigma_mode(const std::string& text);

/// Smallest N with log log log N > 0 (N > e^e).
inline constexpr std::int64_t kMinNForLog3 = 16;
/// Smallest N with log log log log N > 0 (N > e^{e^e} = 3814279.1...).
inline constexpr std::int64_t kMinNForLog4 = 3814280;

/// log applied k times, in the working precision of T.
/// Throws DomainError when an intermediate logarithm is <= 0.
template <class T>
T iterated_log(T x, int k) {
  using std::log;
  if (k < 1 || k > 4) throw DomainError("iterated_log: k must be in {1,2,3,4}");
  for (int i = 0; i < k; ++i) {
    if (!(x > 0)) throw DomainError("iterated_log: intermediate logarithm is not positive");
    x = log(x);
  }
  if (!(x > 0)) throw DomainError("iterated_log: result is not positive");
  return x;
}

double iterated_log(double x, int k);

/// Progression {alpha*l}, derivative order j and distance parameter A.
struct ProgressionParams {
  double alpha = 1.0;
  std::int64_t n_range = 10000;
  int j = 0;
  double a_param = 1.0;
  SigmaMode sigma_mode = SigmaMode::NearHalf;

  /// Throws DomainError on alpha <= 0, j < 0, A <= 0, N < 16 or a sigma
  /// outside (1/2, 1).
  void validate() const;
  bool operator==(const ProgressionParams&) const = default;
};

struct EvalConfig {
  std::int64_t truncation = 1000;
  double epsilon = 0.1;
  int precision_bits = 53;
  double kappa = 0.45;
  /// Lower edge sigma_0 of the approximation regime; sigma >= sigma_0 + epsilon.
  double sigma0 = 0.5;
  /// Implied constant of the truncation error bound.
  double error_constant = 1.0;

  void validate() const;
};

/// 1/2 + A/log_2 N (NearHalf) or 1 - A/log_2 N (NearOne).
double sigma_of(const ProgressionParams& params);

/// Shared log-scale quantities of N, computed in extended precision.
struct LogScales {
  long double log1;
  long double log2;
  long double log3;
};

/// Requires N >= 16 so that log_3 N > 0.
LogScales log_scales(std::int64_t n);

}  // namespace zres
