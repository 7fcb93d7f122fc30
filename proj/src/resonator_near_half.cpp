#include "zres/resonator_near_half.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "zres/core_params.hpp"
#include "zres/numeric.hpp"

namespace zres {

namespace {

struct LogTriple {
  long double l1, l2, l3;
};

LogTriple logs_of(std::int64_t n) {
  const long double x = static_cast<long double>(n);
  return {iterated_log<long double>(x, 1), iterated_log<long double>(x, 2),
          iterated_log<long double>(x, 3)};
}

std::vector<std::int64_t> small_primes(std::int64_t limit) {
  std::vector<char> composite(static_cast<std::size_t>(limit) + 1, 0);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::int64_t k = i * i; k <= limit; k += i) composite[k] = 1;
  }
  return out;
}

}  // namespace

void ResonatorConfig::validate() const {
  const double em1 = std::numbers::e - 1.0;
  if (!(gamma > 0 && gamma * em1 < 1)) throw DomainError("gamma must lie in (0, 1/(e-1))");
  if (!(b > em1 && b * gamma < 1)) throw DomainError("b must lie in (e-1, 1/gamma)");
  if (!(delta > 0 && delta < 1)) throw DomainError("delta must lie in (0, 1)");
  if (!(kappa > 0 && kappa < 1)) throw DomainError("kappa must lie in (0, 1)");
  if (max_support <= 0) throw DomainError("max_support must be positive");
}

bool PrimeBand::contains(std::int64_t p) const {
  return std::binary_search(primes.begin(), primes.end(), p);
}

int PrimeBand::shell_of(std::int64_t p) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p) throw DomainError("shell_of: prime not in the band");
  return shells[it - primes.begin()];
}

PrimeBand build_prime_band(std::int64_t n, double gamma, int precision_bits) {
  if (!(gamma > 0)) throw DomainError("build_prime_band: gamma must be positive");
  PrimeBand band;
  band.n = n;
  band.gamma = gamma;
  long double base = 0;
  bool empty = false;
  with_precision(precision_bits, [&](auto zero) {
    using T = decltype(zero);
    using std::exp;
    using std::floor;
    using std::pow;
    const T x = T(n);
    const T l1 = iterated_log<T>(x, 1), l2 = iterated_log<T>(x, 2);
    (void)iterated_log<T>(x, 3);
    const T big_l = l1 * l2;
    const T width = pow(l2, T(gamma));
    empty = !(width > 1);
    base = static_cast<long double>(big_l);
    band.lower = static_cast<long double>(exp(T(1)) * big_l);
    band.upper = static_cast<long double>(exp(width) * big_l);
    band.max_shell = static_cast<int>(floor(width));
    return 0;
  });
  if (empty) throw DomainError("build_prime_band: empty band, exp((log_2 N)^gamma) <= e");
  if (!(band.upper < 9.2e18L)) throw DomainError("build_prime_band: upper bound beyond 2^63");

  const auto lo = static_cast<std::int64_t>(std::floor(band.lower)) + 1;
  const auto hi = static_cast<std::int64_t>(std::floor(band.upper));
  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(hi))) + 1;
  const std::vector<std::int64_t> base_primes = small_primes(root);

  constexpr std::int64_t kSegment = 1 << 18;
  std::vector<char> composite;
  for (std::int64_t seg = lo; seg <= hi; seg += kSegment) {
    const std::int64_t seg_hi = std::min(hi, seg + kSegment - 1);
    composite.assign(static_cast<std::size_t>(seg_hi - seg + 1), 0);
    for (std::int64_t p : base_primes) {
      if (p * p > seg_hi) break;
      std::int64_t start = std::max(p * p, ((seg + p - 1) / p) * p);
      for (std::int64_t k = start; k <= seg_hi; k += p) composite[k - seg] = 1;
    }
    for (std::int64_t v = std::max<std::int64_t>(seg, 2); v <= seg_hi; ++v) {
      if (composite[v - seg]) continue;
      const long double pv = static_cast<long double>(v);
      if (!(pv > band.lower && pv <= band.upper)) continue;
      int k = static_cast<int>(std::floor(std::log(pv / base)));
      k = std::max(k, 1);
      while (k > 1 && !(pv > std::exp(static_cast<long double>(k)) * base)) --k;
      while (pv > std::exp(static_cast<long double>(k + 1)) * base) ++k;
      band.primes.push_back(v);
      band.shells.push_back(k);
    }
  }
  if (band.primes.empty()) throw DomainError("build_prime_band: no primes in the band");
  return band;
}

FactoredInteger FactoredInteger::from_primes(std::vector<std::int64_t> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  FactoredInteger m;
  for (std::int64_t p : primes) m.log_value += std::log(static_cast<long double>(p));
  m.prime_factors = std::move(primes);
  return m;
}

bool FactoredInteger::divides(const FactoredInteger& other) const {
  return std::includes(other.prime_factors.begin(), other.prime_factors.end(),
                       prime_factors.begin(), prime_factors.end());
}

long double log_ratio(const FactoredInteger& m, const FactoredInteger& n) {
  long double out = 0;
  auto a = m.prime_factors.begin(), b = n.prime_factors.begin();
  while (a != m.prime_factors.end() || b != n.prime_factors.end()) {
    if (b == n.prime_factors.end() || (a != m.prime_factors.end() && *a < *b)) {
      out += std::log(static_cast<long double>(*a++));
    } else if (a == m.prime_factors.end() || *b < *a) {
      out -= std::log(static_cast<long double>(*b++));
    } else {
      ++a;
      ++b;
    }
  }
  return out;
}

long double weight_f(std::int64_t p, const PrimeBand& band, double sigma) {
  if (!band.contains(p)) return 0;
  const LogTriple lg = logs_of(band.n);
  const long double s = sigma;
  const long double scale = std::pow(lg.l1, 1 - s) * std::pow(lg.l2, s) / std::pow(lg.l3, 1 - s);
  const long double lp = std::log(static_cast<long double>(p));
  return scale / (std::exp(s * lp) * (lp - lg.l2 - lg.l3));
}

long double weight_f(const FactoredInteger& m, const PrimeBand& band, double sigma) {
  long double out = 1;
  for (std::int64_t p : m.prime_factors) out *= weight_f(p, band, sigma);
  return out;
}

long double delta_k(int k, std::int64_t n, double sigma, double b) {
  if (k < 1) throw DomainError("delta_k: k must be positive");
  const LogTriple lg = logs_of(n);
  const long double e = 2 - 2 * static_cast<long double>(sigma);
  return b * std::pow(lg.l1, e) / (static_cast<long double>(k) * k * std::pow(lg.l3, e));
}

namespace {

// Largest allowed factor count per shell (index 0 unused).
std::vector<int> shell_caps(const PrimeBand& band, double sigma, double b) {
  std::vector<int> caps(band.max_shell + 2, 0);
  for (int k = 1; k <= band.max_shell + 1; ++k) {
    const long double d = delta_k(k, band.n, sigma, b);
    caps[k] = static_cast<int>(std::ceil(d)) - 1;
  }
  return caps;
}

}  // namespace

bool in_pruned_support(const FactoredInteger& m, const PrimeBand& band, double sigma, double b) {
  std::map<int, int> counts;
  for (std::int64_t p : m.prime_factors) ++counts[band.shell_of(p)];
  for (auto [k, c] : counts) {
    if (!(c < delta_k(k, band.n, sigma, b))) return false;
  }
  return true;
}

std::int64_t pruned_support_count(const PrimeBand& band, double sigma, double b) {
  const std::vector<int> caps = shell_caps(band, sigma, b);
  std::map<int, int> sizes;
  for (int k : band.shells) ++sizes[k];
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  __int128 total = 1;
  for (auto [k, s] : sizes) {
    __int128 shell = 0, binom = 1;
    for (int c = 0; c <= std::min(s, caps[k]); ++c) {
      shell += binom;
      binom = binom * (s - c) / (c + 1);
      if (shell > kMax) break;
    }
    total *= shell;
    if (total > kMax) return kMax;
  }
  return static_cast<std::int64_t>(total);
}

std::vector<FactoredInteger> enumerate_pruned_support(const PrimeBand& band, double sigma,
                                                      double b, std::int64_t budget) {
  if (pruned_support_count(band, sigma, b) > budget) {
    throw BudgetExceeded("pruned support larger than the enumeration budget");
  }
  const std::vector<int> caps = shell_caps(band, sigma, b);
  std::vector<long double> logs(band.primes.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(static_cast<long double>(band.primes[i]));

  std::vector<FactoredInteger> out;
  std::vector<int> counts(caps.size(), 0);
  FactoredInteger cur;
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (i == band.primes.size()) {
      out.push_back(cur);
      return;
    }
    self(self, i + 1);
    const int k = band.shells[i];
    if (counts[k] < caps[k]) {
      ++counts[k];
      cur.prime_factors.push_back(band.primes[i]);
      const long double saved = cur.log_value;
      cur.log_value += logs[i];
      self(self, i + 1);
      cur.log_value = saved;
      cur.prime_factors.pop_back();
      --counts[k];
    }
  };
  dfs(dfs, 0);
  return out;
}

namespace {

std::vector<FactoredInteger> sample_pruned_support(const PrimeBand& band, double sigma, double b,
                                                   std::int64_t draws, std::uint64_t seed) {
  std::vector<long double> include(band.primes.size());
  for (std::size_t i = 0; i < include.size(); ++i) {
    const long double f = weight_f(band.primes[i], band, sigma);
    include[i] = f * f / (1 + f * f);
  }
  const std::vector<int> caps = shell_caps(band, sigma, b);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::set<std::vector<std::int64_t>> seen;
  std::vector<FactoredInteger> out;
  std::vector<int> counts(caps.size());
  for (std::int64_t d = 0; d < draws; ++d) {
    std::fill(counts.begin(), counts.end(), 0);
    std::vector<std::int64_t> factors;
    bool ok = true;
    for (std::size_t i = 0; i < include.size(); ++i) {
      if (unit(rng) < include[i]) {
        factors.push_back(band.primes[i]);
        if (++counts[band.shells[i]] > caps[band.shells[i]]) ok = false;
      }
    }
    if (ok && seen.insert(factors).second) out.push_back(FactoredInteger::from_primes(factors));
  }
  // The empty product is always a member.
  if (seen.insert(std::vector<std::int64_t>{}).second) out.push_back(FactoredInteger{});
  return out;
}

}  // namespace

ResonatorNearHalf build_resonator_near_half(std::int64_t n, std::int64_t t_len, double sigma,
                                            const ResonatorConfig& config, const PrimeBand& band) {
  config.validate();
  if (t_len < 16) throw DomainError("build_resonator_near_half: T must be >= 16");
  ResonatorNearHalf res;
  res.t_len = t_len;
  const long double t = static_cast<long double>(t_len);
  const long double log_step = std::log1p(std::log(t) / t);
  res.block_ratio = 1 + std::log(t) / t;
  res.cap = static_cast<std::int64_t>(std::floor(std::pow(t, static_cast<long double>(config.kappa))));
  if (band.n != n) throw DomainError("build_resonator_near_half: band built for another N");

  std::vector<FactoredInteger> members;
  if (pruned_support_count(band, sigma, config.b) <= config.max_support) {
    members = enumerate_pruned_support(band, sigma, config.b, config.max_support);
  } else if (config.allow_sampling) {
    members = sample_pruned_support(band, sigma, config.b, config.max_support, config.seed);
    res.exhaustive = false;
  } else {
    throw BudgetExceeded("pruned support exceeds max_support and sampling is disabled");
  }
  res.members = static_cast<std::int64_t>(members.size());

  struct Block {
    std::size_t rep;
    long double mass = 0;
  };
  std::map<long, Block> blocks;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const long double f = weight_f(members[i], band, sigma);
    res.f2_mass += f * f;
    const long l = static_cast<long>(std::floor(members[i].log_value / log_step));
    auto [it, fresh] = blocks.try_emplace(l, Block{i, 0});
    if (!fresh && members[i].log_value < members[it->second.rep].log_value) it->second.rep = i;
    it->second.mass += f * f;
  }

  struct Pick {
    long l;
    std::size_t rep;
    long double r2;
  };
  std::vector<Pick> picks;
  for (const auto& [l, blk] : blocks) {
    long double r2 = blk.mass;
    for (long nb : {l - 1, l + 1}) {
      auto it = blocks.find(nb);
      if (it != blocks.end()) r2 += it->second.mass;
    }
    picks.push_back({l, blk.rep, r2});
  }
  if (static_cast<std::int64_t>(picks.size()) > res.cap) {
    std::stable_sort(picks.begin(), picks.end(),
                     [](const Pick& a, const Pick& b) { return a.r2 > b.r2; });
    picks.resize(static_cast<std::size_t>(res.cap));
    std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) { return a.l < b.l; });
    res.truncated = true;
  }
  for (const Pick& p : picks) {
    res.support.push_back(members[p.rep]);
    res.weights.push_back(std::sqrt(p.r2));
  }
  return res;
}

std::complex<double> eval_resonator(const ResonatorNearHalf& r, double t) {
  long double re = 0, im = 0;
  for (std::size_t i = 0; i < r.support.size(); ++i) {
    const long double phase = static_cast<long double>(t) * r.support[i].log_value;
    re += r.weights[i] * std::cos(phase);
    im -= r.weights[i] * std::sin(phase);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

long double compute_A_N(const PrimeBand& band, double sigma) {
  long double out = 1;
  for (std::int64_t p : band.primes) {
    const long double f = weight_f(p, band, sigma);
    const long double ps = std::pow(static_cast<long double>(p), -static_cast<long double>(sigma));
    out *= (1 + f * f + f * ps) / (1 + f * f);
  }
  return out;
}

namespace {

// Per-subset f(n) and log n for every subset of the band.
struct SubsetTable {
  std::vector<long double> f, log;
};

SubsetTable subset_table(const PrimeBand& band, double sigma) {
  const std::size_t k = band.primes.size();
  if (k > 16) throw DomainError("ratio-form A_N needs a band of at most 16 primes");
  SubsetTable t;
  t.f.assign(std::size_t{1} << k, 1.0L);
  t.log.assign(std::size_t{1} << k, 0.0L);
  for (std::size_t mask = 1; mask < t.f.size(); ++mask) {
    const int low = std::countr_zero(mask);
    const std::size_t rest = mask & (mask - 1);
    t.f[mask] = t.f[rest] * weight_f(band.primes[low], band, sigma);
    t.log[mask] = t.log[rest] + std::log(static_cast<long double>(band.primes[low]));
  }
  return t;
}

template <class KeepN, class KeepD>
long double ratio_form(const PrimeBand& band, double sigma, KeepN keep_n, KeepD keep_d) {
  const SubsetTable t = subset_table(band, sigma);
  const long double s = sigma;
  CompensatedSum<long double> num, den;
  for (std::size_t n = 0; n < t.f.size(); ++n) {
    den.add(t.f[n] * t.f[n]);
    if (!keep_n(n)) continue;
    CompensatedSum<long double> inner;
    for (std::size_t d = n;; d = (d - 1) & n) {
      if (keep_d(n, d, t)) inner.add(t.f[d] * std::exp(s * t.log[d]));
      if (d == 0) break;
    }
    num.add(t.f[n] * std::exp(-s * t.log[n]) * inner.value());
  }
  return num.value() / den.value();
}

}  // namespace

long double brute_A_N(const PrimeBand& band, double sigma) {
  return ratio_form(
      band, sigma, [](std::size_t) { return true; },
      [](std::size_t, std::size_t, const SubsetTable&) { return true; });
}

long double complement_contribution(const PrimeBand& band, double sigma, double b) {
  const std::vector<int> caps = shell_caps(band, sigma, b);
  auto outside = [&](std::size_t mask) {
    std::vector<int> counts(caps.size(), 0);
    for (std::size_t i = 0; i < band.primes.size(); ++i) {
      if ((mask >> i) & 1U) {
        if (++counts[band.shells[i]] > caps[band.shells[i]]) return true;
      }
    }
    return false;
  };
  return ratio_form(band, sigma, outside,
                    [](std::size_t, std::size_t, const SubsetTable&) { return true; });
}

long double small_divisor_contribution(const PrimeBand& band, double sigma, double eps) {
  const long double cut = eps * std::log(static_cast<long double>(band.n));
  return ratio_form(
      band, sigma, [](std::size_t) { return true; },
      [cut](std::size_t n, std::size_t d, const SubsetTable& t) { return t.log[d] <= t.log[n] - cut; });
}

double prop31_lower_bound(std::int64_t n, double sigma, double gamma, double delta) {
  const LogTriple lg = logs_of(n);
  const long double s = sigma;
  return static_cast<double>(std::exp(delta * gamma * std::pow(lg.l1, 1 - s) * std::pow(lg.l3, s) /
                                      std::pow(lg.l2, s)));
}

}  // namespace zres
