#pragma once

// Resonator on square-free products of a prime band, pruned shell by shell,
// with geometric-block representatives and the A_N product.

#include <complex>
#include <cstdint>
#include <vector>

#include "zres/errors.hpp"

namespace zres {

struct ResonatorConfig {
  double gamma = 0.45;
  double b = 1.8;
  double delta = 0.9;
  double kappa = 0.45;
  /// Largest support enumerated exhaustively.
  std::int64_t max_support = 1 << 20;
  bool allow_sampling = true;
  std::uint64_t seed = 7;

  /// Throws DomainError unless gamma (e-1) < 1, e-1 < b < 1/gamma,
  /// 0 < delta < 1, 0 < kappa < 1 and max_support > 0.
  void validate() const;
};

struct PrimeBand {
  std::int64_t n = 0;
  double gamma = 0;
  /// e L and exp((log_2 N)^gamma) L with L = log N log_2 N.
  long double lower = 0;
  long double upper = 0;
  std::vector<std::int64_t> primes;
  /// shells[i] = k with e^k L < primes[i] <= e^{k+1} L.
  std::vector<int> shells;
  int max_shell = 0;

  bool contains(std::int64_t p) const;
  /// Throws DomainError when p is not in the band.
  int shell_of(std::int64_t p) const;
};

/// Primes in (e L, exp((log_2 N)^gamma) L] by segmented sieve, bounds
/// evaluated at `precision_bits`. Throws DomainError for an empty band
/// (exp((log_2 N)^gamma) <= e, or no prime inside) or an upper bound beyond
/// 2^63.
PrimeBand build_prime_band(std::int64_t n, double gamma, int precision_bits = 53);

/// Square-free integer kept as its prime set and log.
struct FactoredInteger {
  std::vector<std::int64_t> prime_factors;  // ascending
  long double log_value = 0;

  static FactoredInteger from_primes(std::vector<std::int64_t> primes);
  bool divides(const FactoredInteger& other) const;
};

/// log(m/n) from the symmetric difference of the factor sets.
long double log_ratio(const FactoredInteger& m, const FactoredInteger& n);

/// f(p) on the band, 0 elsewhere.
long double weight_f(std::int64_t p, const PrimeBand& band, double sigma);
/// Multiplicative extension to a factored integer.
long double weight_f(const FactoredInteger& m, const PrimeBand& band, double sigma);

/// b (log N)^{2-2 sigma} / (k^2 (log_3 N)^{2-2 sigma})
long double delta_k(int k, std::int64_t n, double sigma, double b);

/// True iff m has fewer than Delta_k factors in every shell k.
bool in_pruned_support(const FactoredInteger& m, const PrimeBand& band, double sigma, double b);

struct ResonatorNearHalf {
  std::vector<FactoredInteger> support;  // block representatives, ascending
  std::vector<long double> weights;      // r(m_l)
  long double block_ratio = 1;           // 1 + log T / T
  std::int64_t t_len = 0;
  std::int64_t cap = 0;                  // floor(T^kappa)
  /// Members of the pruned support that were enumerated (or sampled).
  std::int64_t members = 0;
  /// sum of f(n)^2 over the enumerated members.
  long double f2_mass = 0;
  bool exhaustive = true;
  bool truncated = false;
};

/// Size of the pruned support, counted shell by shell without enumeration
/// (saturates at INT64_MAX).
std::int64_t pruned_support_count(const PrimeBand& band, double sigma, double b);

/// All members of the pruned support. Throws BudgetExceeded when there are
/// more than `budget`.
std::vector<FactoredInteger> enumerate_pruned_support(const PrimeBand& band, double sigma,
                                                      double b, std::int64_t budget);

/// Block representatives and weights. Enumerates the pruned support when it
/// fits in config.max_support, otherwise samples up to max_support draws
/// from the f^2 product measure (marked non-exhaustive) or throws
/// BudgetExceeded when sampling is disabled.
ResonatorNearHalf build_resonator_near_half(std::int64_t n, std::int64_t t_len, double sigma,
                                            const ResonatorConfig& config, const PrimeBand& band);

/// sum_l r(m_l) e^{-i t log m_l}
std::complex<double> eval_resonator(const ResonatorNearHalf& r, double t);

/// prod_p (1 + f^2 + f p^{-sigma}) / (1 + f^2)
long double compute_A_N(const PrimeBand& band, double sigma);

/// A_N from its defining ratio, by enumerating every subset of the band
/// and every divisor. Band must have at most 16 primes.
long double brute_A_N(const PrimeBand& band, double sigma);

/// Part of the ratio-form A_N coming from n outside the pruned support.
long double complement_contribution(const PrimeBand& band, double sigma, double b);

/// Part of the ratio-form A_N restricted to divisors d <= n / N^eps.
long double small_divisor_contribution(const PrimeBand& band, double sigma, double eps = 0.05);

/// exp(delta gamma (log N)^{1-sigma} (log_3 N)^sigma / (log_2 N)^sigma)
double prop31_lower_bound(std::int64_t n, double sigma, double gamma, double delta);

}  // namespace zres
