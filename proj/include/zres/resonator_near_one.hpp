#pragma once

// Characteristic-function resonator on the x-smooth integers up to
// floor(sqrt N), and the divisor-weighted key ratio it feeds.

#include <cstdint>
#include <string>
#include <vector>

#include "zres/errors.hpp"

namespace zres {

enum class SmoothnessRule {
  LogLog,         // x = log N log_2 N
  LogLogOverLog3  // x = log N log_2 N / log_3 N
};

std::string to_string(SmoothnessRule rule);
/// Accepts "loglog" and "loglog/log3". Throws DomainError otherwise.
SmoothnessRule parse_smoothness_rule(const std::string& text);

double smoothness_bound(std::int64_t n, SmoothnessRule rule);

struct ResonatorNearOne {
  std::int64_t n = 0;
  /// floor(sqrt N)
  std::int64_t m_max = 0;
  double smoothness_bound = 0;
  std::vector<std::int64_t> members;  // ascending, starts with 1

  /// Resonator on an explicit member list (sorted and deduplicated).
  static ResonatorNearOne from_members(std::vector<std::int64_t> members);
  bool contains(std::int64_t m) const;
};

/// All integers <= floor(sqrt N) whose prime factors are <= x. Requires
/// N >= 10^4.
ResonatorNearOne build_resonator_near_one(std::int64_t n, double x);
ResonatorNearOne build_resonator_near_one(std::int64_t n,
                                          SmoothnessRule rule = SmoothnessRule::LogLog);

/// sum over members n and k | n with n/k a member of k^{-sigma} (log k)^j,
/// divided by the number of members.
double key_ratio(const ResonatorNearOne& r, double sigma, int j);

}  // namespace zres
