#include "zres/dickman_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace zres {

namespace {

constexpr int kInterpPoints = 6;

// 3-point Gauss-Legendre on [-1, 1].
constexpr long double kGl3Node = 0.774596669241483377035853079956479922L;
constexpr long double kGl3Outer = 5.0L / 9.0L;
constexpr long double kGl3Inner = 8.0L / 9.0L;

// 5-point Gauss-Legendre on [-1, 1].
constexpr long double kGl5Nodes[5] = {
    -0.906179845938663992797626878299392965L, -0.538469310105683091036314420700208805L, 0.0L,
    0.538469310105683091036314420700208805L, 0.906179845938663992797626878299392965L};
constexpr long double kGl5Weights[5] = {
    0.236926885056189087514264040719917363L, 0.478628670499366468041291514835638192L,
    0.568888888888888888888888888888888889L, 0.478628670499366468041291514835638192L,
    0.236926885056189087514264040719917363L};

}  // namespace

long double DickmanTable::interpolate(const std::vector<long double>& values, int spu,
                                      long double u) {
  if (u <= 1.0L) return 1.0L;
  const long double pos = u * spu;
  auto idx = static_cast<long>(std::floor(pos));
  const long last = static_cast<long>(values.size()) - 1;
  if (idx >= last) idx = last - 1;
  // Unit interval [k, k+1] containing u; an integer u belongs to [u-1, u].
  long k = idx / spu;
  if (k * spu == idx && pos == static_cast<long double>(idx)) return values[idx];
  const long lo = k * spu;
  const long hi = std::min(lo + spu, last);
  long start = idx - kInterpPoints / 2 + 1;
  start = std::clamp(start, lo, hi - (kInterpPoints - 1));
  // Equispaced nodes: 1 / prod_{b != a} (a - b).
  static constexpr long double kDenom[kInterpPoints] = {-1.0L / 120, 1.0L / 24, -1.0L / 12,
                                                        1.0L / 12,  -1.0L / 24, 1.0L / 120};
  const long double x = pos - start;
  long double prefix[kInterpPoints + 1], suffix[kInterpPoints + 1];
  prefix[0] = suffix[kInterpPoints] = 1;
  for (int a = 0; a < kInterpPoints; ++a) prefix[a + 1] = prefix[a] * (x - a);
  for (int a = kInterpPoints - 1; a >= 0; --a) suffix[a] = suffix[a + 1] * (x - a);
  long double result = 0;
  for (int a = 0; a < kInterpPoints; ++a) {
    result += prefix[a] * suffix[a + 1] * kDenom[a] * values[start + a];
  }
  return result;
}

namespace {

// Weights (in units of h) of the interpolatory rule integrating over the
// step [-1, 0] from nodes at offsets first, first+1, ..., first+count-1.
const std::vector<long double>& step_weights(int first, int count) {
  static std::map<std::pair<int, int>, std::vector<long double>> cache;
  auto& w = cache[{first, count}];
  if (!w.empty()) return w;
  w.assign(count, 0.0L);
  const long double nodes[3] = {-0.5L - 0.5L * kGl3Node, -0.5L, -0.5L + 0.5L * kGl3Node};
  const long double weights[3] = {0.5L * kGl3Outer, 0.5L * kGl3Inner, 0.5L * kGl3Outer};
  for (int a = 0; a < count; ++a) {
    for (int q = 0; q < 3; ++q) {
      long double basis = 1;
      for (int b = 0; b < count; ++b) {
        if (b != a) basis *= (nodes[q] - (first + b)) / static_cast<long double>(a - b);
      }
      w[a] += weights[q] * basis;
    }
  }
  return w;
}

}  // namespace

// Solves u rho(u) = int_{u-1}^{u} rho(v) dv on the grid. Every step integral
// is a positive quantity read from interpolants confined to one unit
// interval, and the new value rho(u_i) enters its own last step implicitly,
// so relative accuracy is kept as rho decays.
std::vector<long double> DickmanTable::integrate(int u_max, int spu) {
  const long n = static_cast<long>(u_max) * spu;
  const long double h = 1.0L / spu;
  std::vector<long double> v(n + 1, 1.0L);
  std::vector<long double> step(n + 1, h);  // step[m] = int_{u_{m-1}}^{u_m} rho

  // Integral over step m using nodes with index <= known, all inside the
  // unit interval holding the step. Returns the weight of node m separately
  // when m itself is unknown.
  auto step_integral = [&](long m, long known, long double* self_weight) {
    const long lo = ((m - 1) / spu) * spu;
    const long hi = std::min(lo + spu, known);
    const int count = static_cast<int>(std::min<long>(kInterpPoints, hi - lo + 1));
    long start = std::clamp(m - 3, lo, hi - (count - 1));
    const auto& w = step_weights(static_cast<int>(start - m), count);
    long double total = 0;
    for (int a = 0; a < count; ++a) {
      if (self_weight && start + a == m) {
        *self_weight = w[a];
      } else {
        total += w[a] * v[start + a];
      }
    }
    return h * total;
  };

  // Solves for node i with stencils reading nodes up to `known` (>= i - 1);
  // nodes past i are provisional values.
  // Sums of 64 consecutive steps, cached once every step in the block is
  // final. Partial blocks and the recent steps are summed directly.
  constexpr long kBlock = 64;
  std::vector<long double> block_sum((n + kBlock) / kBlock, -1.0L);
  auto window_sum = [&](long first, long last) {
    long double total = 0;
    long m = first;
    while (m <= last) {
      const long b = m / kBlock;
      const long b_end = b * kBlock + kBlock - 1;
      if (m == b * kBlock && b_end <= last) {
        if (block_sum[b] < 0) {
          long double acc = 0;
          for (long q = m; q <= b_end; ++q) acc += step[q];
          block_sum[b] = acc;
        }
        total += block_sum[b];
        m = b_end + 1;
      } else {
        total += step[m++];
      }
    }
    return total;
  };

  // Solves for node i with stencils reading nodes up to `known` (>= i - 1);
  // nodes past i are provisional values.
  auto solve_node = [&](long i, long known) {
    // Steps at or after i - 8 may still change.
    const long settled = std::max(i - spu, i - 9);
    long double window = window_sum(i - spu + 1, settled);
    for (long m = settled + 1; m < i; ++m) {
      if (m >= i - 2) step[m] = step_integral(m, known, nullptr);
      window += step[m];
    }
    long double self = 0;
    const long double known_part = step_integral(i, std::max(i, known), &self);
    v[i] = (window + known_part) / (i * h - h * self);
    step[i] = known_part + h * self * v[i];
  };

  for (long i = spu + 1; i <= n; ++i) {
    solve_node(i, i - 1);
    const long lo = ((i - 1) / spu) * spu;
    if (i == lo + kInterpPoints - 1) {
      // The first nodes after an integer were solved with short stencils;
      // iterate them with the full one until they settle.
      for (int pass = 0; pass < 4; ++pass) {
        for (long r = lo + 1; r <= i; ++r) solve_node(r, i);
      }
      for (long m = lo + 1; m <= i; ++m) step[m] = step_integral(m, i, nullptr);
    }
  }
  // Re-read the last steps with their final stencils.
  for (long m = std::max<long>(spu + 1, n - 2); m <= n; ++m) step[m] = step_integral(m, n, nullptr);
  return v;
}

DickmanTable DickmanTable::build(int u_max, int steps_per_unit) {
  if (u_max < 2) throw DomainError("DickmanTable: u_max must be >= 2");
  if (steps_per_unit < 16 || steps_per_unit % 2 != 0) {
    throw DomainError("DickmanTable: steps_per_unit must be even and >= 16");
  }
  DickmanTable table;
  table.u_max_ = u_max;
  table.steps_per_unit_ = steps_per_unit;
  table.values_ = integrate(u_max, steps_per_unit);

  const std::vector<long double> coarse = integrate(u_max, steps_per_unit / 2);
  std::vector<long double> node_err(coarse.size());
  for (std::size_t m = 0; m < coarse.size(); ++m) {
    node_err[m] = std::fabs(table.values_[2 * m] - coarse[m]) / 15.0L;
  }
  table.errors_.resize(coarse.size() - 1);
  long double worst = 0;
  for (std::size_t m = 0; m + 1 < coarse.size(); ++m) {
    table.errors_[m] = std::max(node_err[m], node_err[m + 1]);
    worst = std::max(worst, table.errors_[m]);
  }
  table.max_error_ = static_cast<double>(worst);
  return table;
}

long double DickmanTable::rho(long double u) const {
  if (u < 0) throw DomainError("rho: u must be non-negative");
  if (u > u_max_) throw DomainError("rho: u beyond the table range, extension required");
  return interpolate(values_, steps_per_unit_, u);
}

long double DickmanTable::error_near(long double u) const {
  if (u <= 1) return 0;
  auto m = static_cast<std::size_t>(u * steps_per_unit_ / 2);
  m = std::min(m, errors_.size() - 1);
  return errors_[m];
}

const DickmanTable& dickman_table(int u_max, int steps_per_unit) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<DickmanTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{u_max, steps_per_unit}];
  if (!slot) slot = std::make_unique<DickmanTable>(DickmanTable::build(u_max, steps_per_unit));
  return *slot;
}

double dickman_rho(double u, double table_accuracy) {
  constexpr int kUMax = 20;
  if (u > kUMax) throw DomainError("dickman_rho: u > 20, extension required");
  for (int spu = 1024; spu <= 8192; spu *= 2) {
    const DickmanTable& table = dickman_table(kUMax, spu);
    if (table.error_estimate() <= table_accuracy) return static_cast<double>(table.rho(u));
  }
  throw PrecisionUnattainable("dickman_rho: table accuracy not reachable");
}

namespace {

// Composite 5-point Gauss-Legendre of e^{Au} u^j rho(u) over [0, U] with
// `panels_per_unit` panels per unit; accumulates the propagated table error
// when `err` is non-null.
long double moment_quadrature(const DickmanTable& table, int j, long double a, int u_max,
                              int panels_per_unit, long double* err) {
  const long double h = 1.0L / panels_per_unit;
  const long total = static_cast<long>(u_max) * panels_per_unit;
  long double sum = 0, comp = 0, err_sum = 0;
  for (long p = 0; p < total; ++p) {
    const long double mid = (p + 0.5L) * h;
    long double panel = 0;
    long double panel_err = 0;
    for (int q = 0; q < 5; ++q) {
      const long double u = mid + 0.5L * h * kGl5Nodes[q];
      const long double w = kGl5Weights[q] * 0.5L * h * std::exp(a * u + j * std::log(u));
      panel += w * table.rho(u);
      if (err) panel_err += w * table.error_near(u);
    }
    const long double y = panel - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    err_sum += panel_err;
  }
  if (err) *err = err_sum;
  return sum;
}

// Bound on int_U^inf e^{Au} u^j rho(u) du using rho(u) <= rho(u-1)/u.
long double tail_bound(long double rho_u, int j, long double a, int u_max) {
  const long double big_u = u_max;
  const long double ratio = std::exp(a) / (big_u + 1);
  if (ratio >= 1) return INFINITY;
  long double total = 0;
  long double scale = rho_u;
  for (int k = 0; k < 100000; ++k) {
    const long double top = big_u + k + 1;
    const long double term = scale * std::exp(a * top) * std::pow(top, j);
    total += term;
    if (k > 10 && term < 1e-30L * total) {
      // Remaining terms shrink at least geometrically once (1+1/top)^j * ratio < 1.
      const long double q = std::pow(1.0L + 1.0L / top, j) * ratio;
      if (q < 1) return total + term * q / (1 - q);
    }
    scale /= (big_u + 1);
  }
  return INFINITY;
}

}  // namespace

namespace {

struct Moment {
  QuadratureResult result;
  bool tail_certified = false;
  long double tail = 0;
};

Moment compute_moment(int j, double a) {
  const int u_max =
      std::max(20, static_cast<int>(std::ceil(2.0 * std::exp(a) + j + 10.0)));
  const DickmanTable& table = dickman_table(u_max, 1024);

  long double table_err = 0;
  const long double fine = moment_quadrature(table, j, a, u_max, 1024, &table_err);
  const long double coarse = moment_quadrature(table, j, a, u_max, 512, nullptr);
  Moment m;
  m.tail = tail_bound(table.rho(u_max), j, a, u_max);
  m.tail_certified = std::isfinite(static_cast<double>(m.tail));
  m.result.value = static_cast<double>(fine);
  m.result.error = static_cast<double>(std::fabs(fine - coarse) + table_err + m.tail);
  m.result.u_max = u_max;
  return m;
}

}  // namespace

QuadratureResult d_j_of_A(int j, double a, double accuracy) {
  if (j < 0) throw DomainError("D_j(A): j must be non-negative");
  if (!(a >= 0 && a <= 4)) throw DomainError("D_j(A): A must lie in [0, 4]");
  static std::mutex mu;
  static std::map<std::pair<int, double>, Moment> memo;
  Moment m;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find({j, a});
    if (it == memo.end()) it = memo.emplace(std::make_pair(j, a), compute_moment(j, a)).first;
    m = it->second;
  }
  if (!m.tail_certified || m.tail > accuracy) {
    throw QuadratureFailure("D_j(A): tail not certified at the requested accuracy");
  }
  if (!(m.result.error <= accuracy)) {
    throw QuadratureFailure("D_j(A): error estimate exceeds the requested accuracy");
  }
  return m.result;
}

double y_j(int j, double accuracy) { return d_j_of_A(j, 0.0, accuracy).value; }

double lambda_of_A(double a) {
  const long double e = std::numbers::e_v<long double>;
  return static_cast<double>(1.0L / (std::sqrt(2.0L) * (e - 1.0L) * std::exp(static_cast<long double>(a))));
}

}  // namespace zres
