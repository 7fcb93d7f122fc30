#include "zres/resonator_near_one.hpp"

#include <algorithm>
#include <cmath>

#include "zres/core_params.hpp"
#include "zres/numeric.hpp"

namespace zres {

std::string to_string(SmoothnessRule rule) {
  return rule == SmoothnessRule::LogLog ? "loglog" : "loglog/log3";
}

SmoothnessRule parse_smoothness_rule(const std::string& text) {
  if (text == "loglog") return SmoothnessRule::LogLog;
  if (text == "loglog/log3") return SmoothnessRule::LogLogOverLog3;
  throw DomainError("unknown smoothness rule: " + text);
}

double smoothness_bound(std::int64_t n, SmoothnessRule rule) {
  const long double x = static_cast<long double>(n);
  long double out = iterated_log<long double>(x, 1) * iterated_log<long double>(x, 2);
  if (rule == SmoothnessRule::LogLogOverLog3) out /= iterated_log<long double>(x, 3);
  return static_cast<double>(out);
}

ResonatorNearOne ResonatorNearOne::from_members(std::vector<std::int64_t> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty() || members.front() < 1) throw DomainError("members must be positive");
  ResonatorNearOne r;
  r.m_max = members.back();
  r.members = std::move(members);
  return r;
}

bool ResonatorNearOne::contains(std::int64_t m) const {
  return std::binary_search(members.begin(), members.end(), m);
}

ResonatorNearOne build_resonator_near_one(std::int64_t n, double x) {
  if (n < 10000) throw DomainError("build_resonator_near_one: N must be >= 10^4");
  if (!(x >= 1)) throw DomainError("build_resonator_near_one: x must be >= 1");
  ResonatorNearOne r;
  r.n = n;
  r.smoothness_bound = x;
  auto m = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while ((m + 1) * (m + 1) <= n) ++m;
  while (m * m > n) --m;
  r.m_max = m;
  // Largest prime factor by sieve.
  std::vector<std::int64_t> largest(static_cast<std::size_t>(m) + 1, 1);
  for (std::int64_t p = 2; p <= m; ++p) {
    if (largest[p] != 1) continue;
    for (std::int64_t q = p; q <= m; q += p) largest[q] = p;
  }
  for (std::int64_t v = 1; v <= m; ++v) {
    if (static_cast<double>(largest[v]) <= x) r.members.push_back(v);
  }
  return r;
}

ResonatorNearOne build_resonator_near_one(std::int64_t n, SmoothnessRule rule) {
  return build_resonator_near_one(n, smoothness_bound(n, rule));
}

double key_ratio(const ResonatorNearOne& r, double sigma, int j) {
  if (j < 0) throw DomainError("key_ratio: j must be non-negative");
  const std::int64_t top = r.members.back();
  std::vector<char> in(static_cast<std::size_t>(top) + 1, 0);
  for (std::int64_t v : r.members) in[v] = 1;
  std::vector<long double> weight(static_cast<std::size_t>(top) + 1, 0);
  for (std::int64_t k = 1; k <= top; ++k) {
    const long double lk = std::log(static_cast<long double>(k));
    weight[k] = std::exp(-static_cast<long double>(sigma) * lk) * (j == 0 ? 1.0L : std::pow(lk, j));
  }
  CompensatedSum<long double> total;
  for (std::int64_t m : r.members) {
    for (std::int64_t k = 1; m * k <= top; ++k) {
      if (in[m * k]) total.add(weight[k]);
    }
  }
  return static_cast<double>(total.value() / static_cast<long double>(r.members.size()));
}

}  // namespace zres
