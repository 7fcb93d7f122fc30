#include "zres/zeta_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "zres/numeric.hpp"

namespace zres {

namespace {

namespace mp = boost::multiprecision;

constexpr int kMaxCorrections = 30;
constexpr int kMaxRefOrder = 8;

// B_{2k}/(2k)! for k = 0..kMaxCorrections+1, exact.
const std::vector<mp::cpp_rational>& bernoulli_over_factorial() {
  static const std::vector<mp::cpp_rational> table = [] {
    const int n = 2 * (kMaxCorrections + 1);
    std::vector<mp::cpp_rational> a(n + 1);
    std::vector<mp::cpp_rational> bern(n + 1);
    for (int m = 0; m <= n; ++m) {
      a[m] = mp::cpp_rational(1, m + 1);
      for (int k = m; k >= 1; --k) a[k - 1] = mp::cpp_rational(k) * (a[k - 1] - a[k]);
      bern[m] = a[0];
    }
    std::vector<mp::cpp_rational> out(kMaxCorrections + 2);
    mp::cpp_int fact = 1;
    for (int k = 0; k <= kMaxCorrections + 1; ++k) {
      if (k > 0) fact *= mp::cpp_int(2 * k - 1) * mp::cpp_int(2 * k);
      out[k] = bern[2 * k] / mp::cpp_rational(fact);
    }
    return out;
  }();
  return table;
}

template <class T>
T rational_to(const mp::cpp_rational& q) {
  return static_cast<T>(mp::numerator(q)) / static_cast<T>(mp::denominator(q));
}

template <class T>
const std::vector<T>& em_coefficients() {
  static const std::vector<T> table = [] {
    const auto& exact = bernoulli_over_factorial();
    std::vector<T> out;
    out.reserve(exact.size());
    for (const auto& q : exact) out.push_back(rational_to<T>(q));
    return out;
  }();
  return table;
}

// Truncated Taylor series in h = s - s0.
template <class T>
using Jet = std::vector<Complex<T>>;

template <class T>
Jet<T> jet_mul(const Jet<T>& a, const Jet<T>& b) {
  Jet<T> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k + i < a.size(); ++k) out[i + k] += a[i] * b[k];
  }
  return out;
}

template <class T>
Jet<T> jet_linear(const Complex<T>& a, std::size_t size) {
  Jet<T> out(size);
  out[0] = a;
  if (size > 1) out[1] = Complex<T>(T(1));
  return out;
}

// c0 * exp(slope * h)
template <class T>
Jet<T> jet_exp_linear(const Complex<T>& c0, const T& slope, std::size_t size) {
  Jet<T> out(size);
  Complex<T> term = c0;
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = term;
    term *= slope / T(static_cast<int>(i + 1));
  }
  return out;
}

// 1/(a + h)
template <class T>
Jet<T> jet_reciprocal_linear(const Complex<T>& a, std::size_t size) {
  Jet<T> out(size);
  const Complex<T> inv = Complex<T>(T(1)) / a;
  Complex<T> term = inv;
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = term;
    term = -term * inv;
  }
  return out;
}

template <class T>
T ipow(T x, int n) {
  T r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

template <class T>
T factorial(int n) {
  T f(1);
  for (int i = 2; i <= n; ++i) f *= T(i);
  return f;
}

// Certified bound on the j-th derivative of the Euler-Maclaurin remainder
// after K corrections at cutoff n, via Cauchy's estimate on |s - s0| = radius.
template <class T>
T remainder_bound(int j, const T& sigma, const T& t, std::int64_t n, int k, const T& radius) {
  using std::abs;
  using std::log;
  using std::exp;
  using std::sqrt;
  const auto& coef = em_coefficients<T>();
  const T sigma_min = sigma - radius;
  T prod(1);
  for (int i = 0; i <= 2 * k + 1; ++i) {
    const T re = sigma + T(i);
    prod *= sqrt(re * re + t * t) + radius;
  }
  const T log_n = log(T(n));
  const T decay = exp(-(sigma_min + T(2 * k + 1)) * log_n);
  T bound = abs(coef[k + 1]) * prod * decay / (sigma_min + T(2 * k + 1));
  bound *= factorial<T>(j) / exp(T(j) * log(radius));
  return bound;
}

template <class T>
ReferenceValue zeta_ref_impl(int j, double sigma_d, double t_d, int precision_bits) {
  using std::abs;
  using std::ceil;
  using std::exp;
  using std::log;
  using std::pow;

  const T sigma(sigma_d);
  const T t(t_d);
  const T target = exp(-T(precision_bits) / T(2) * log(T(2)));
  const T radius(0.5);

  const double abs_t = std::abs(t_d);
  const auto base_cutoff = static_cast<std::int64_t>(std::ceil((abs_t + 64.0) / std::acos(-1.0)));

  std::int64_t cutoff = 0;
  int corrections = 0;
  T bound(0);
  bool found = false;
  for (int attempt = 0; attempt < 12 && !found; ++attempt) {
    const std::int64_t n = std::max<std::int64_t>(16, base_cutoff << attempt);
    T prev(-1);
    for (int k = 1; k <= kMaxCorrections; ++k) {
      const T b = remainder_bound<T>(j, sigma, t, n, k, radius);
      if (b <= target) {
        cutoff = n;
        corrections = k;
        bound = b;
        found = true;
        break;
      }
      if (prev >= T(0) && b > prev) break;
      prev = b;
    }
  }
  if (!found) throw PrecisionUnattainable("zeta_derivative_ref: accuracy cannot be certified");

  const std::size_t size = static_cast<std::size_t>(j) + 1;

  // Main sum: sum_{n < cutoff} (-log n)^j n^{-s}.
  CompensatedComplexSum<T> acc;
  for (std::int64_t n = 1; n < cutoff; ++n) {
    const T ln = log(T(n));
    T mag = exp(-sigma * ln);
    if (j > 0) {
      if (n == 1) continue;
      mag *= ipow<T>(-ln, j);
    }
    acc.add(unit_phase<T>(-t * ln) * mag);
  }
  Complex<T> total = acc.value();

  // Remaining terms as jets in h = s - s0; the j-th coefficient times j!
  // is the derivative.
  const T log_n = log(T(cutoff));
  const Complex<T> s0(sigma, t);
  const Complex<T> n_pow_minus_s = unit_phase<T>(-t * log_n) * exp(-sigma * log_n);
  const Jet<T> n_minus_s = jet_exp_linear<T>(n_pow_minus_s, -log_n, size);

  Jet<T> head = jet_mul(jet_exp_linear<T>(n_pow_minus_s * T(cutoff), -log_n, size),
                        jet_reciprocal_linear<T>(s0 - Complex<T>(T(1)), size));
  for (std::size_t i = 0; i < size; ++i) head[i] += n_minus_s[i] * T(0.5);

  const auto& coef = em_coefficients<T>();
  Jet<T> poly = jet_linear<T>(s0, size);  // s(s+1)...(s+2k-2), k = 1
  T n_shift = T(1) / T(cutoff);           // N^{1-2k}
  for (int k = 1; k <= corrections; ++k) {
    if (k > 1) {
      poly = jet_mul(poly, jet_linear<T>(s0 + Complex<T>(T(2 * k - 3)), size));
      poly = jet_mul(poly, jet_linear<T>(s0 + Complex<T>(T(2 * k - 2)), size));
      n_shift /= T(cutoff) * T(cutoff);
    }
    const Jet<T> term = jet_mul(poly, n_minus_s);
    const T scale = coef[k] * n_shift;
    for (std::size_t i = 0; i < size; ++i) head[i] += term[i] * scale;
  }
  total += head[j] * factorial<T>(j);

  ReferenceValue out;
  out.value = total.to_std();
  out.remainder_bound = static_cast<double>(bound);
  out.cutoff = cutoff;
  out.corrections = corrections;
  return out;
}

template <class T>
std::complex<double> partial_sum_impl(int j, double sigma_d, double t_d, std::int64_t truncation) {
  using std::exp;
  using std::log;
  using std::pow;
  const T sigma(sigma_d);
  const T t(t_d);
  CompensatedComplexSum<T> acc;
  for (std::int64_t n = 1; n <= truncation; ++n) {
    if (j > 0 && n == 1) continue;
    const T ln = log(T(n));
    T mag = exp(-sigma * ln);
    if (j > 0) mag *= ipow<T>(ln, j);
    acc.add(unit_phase<T>(-t * ln) * mag);
  }
  return acc.value().to_std();
}

double factorial_d(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGlNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights{0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891};

double second_moment_level(int j, double sigma, double big_t, int panels) {
  const double width = big_t / panels;
  CompensatedSum<double> acc;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
      const double t = mid + 0.5 * width * kGlNodes[q];
      acc.add(kGlWeights[q] * 0.5 * width * std::norm(zeta_derivative_ref(j, sigma, t)));
    }
  }
  return acc.value() / big_t;
}

}  // namespace

std::complex<double> dirichlet_partial_sum(int j, double sigma, double t, std::int64_t truncation,
                                           int precision_bits) {
  if (truncation < 1) throw DomainError("dirichlet_partial_sum: truncation must be >= 1");
  if (j < 0) throw DomainError("dirichlet_partial_sum: j must be non-negative");
  if (j > 0 && j * std::log(std::log(static_cast<double>(truncation) + 1.0)) > 700.0) {
    throw DomainError("dirichlet_partial_sum: (log T)^j overflows");
  }
  return with_precision(precision_bits, [&](auto tag) {
    return partial_sum_impl<decltype(tag)>(j, sigma, t, truncation);
  });
}

double truncation_error_bound(int j, double sigma, std::int64_t truncation, double epsilon,
                              double constant) {
  return constant * factorial_d(j) / std::pow(epsilon, j) *
         std::pow(static_cast<double>(truncation), -sigma + epsilon);
}

ZetaSample zeta_derivative_approx(int j, double sigma, double t, const EvalConfig& config,
                                  bool force) {
  config.validate();
  if (sigma < config.sigma0 + config.epsilon) {
    throw DomainError("zeta_derivative_approx: sigma below sigma0 + epsilon");
  }
  const double big_t = static_cast<double>(config.truncation);
  const bool in_range = t >= big_t && t <= 2.0 * big_t;
  if (!in_range && !force) throw DomainError("zeta_derivative_approx: t outside [T, 2T]");

  ZetaSample out;
  out.sigma = sigma;
  out.t = t;
  out.j = j;
  const std::complex<double> sum =
      dirichlet_partial_sum(j, sigma, t, config.truncation, config.precision_bits);
  out.value = (j % 2 == 0) ? sum : -sum;
  out.error_bound =
      truncation_error_bound(j, sigma, config.truncation, config.epsilon, config.error_constant);
  out.rigorous = in_range;
  return out;
}

ReferenceValue zeta_derivative_ref_detailed(int j, double sigma, double t, int precision_bits) {
  if (!(sigma > 0)) throw DomainError("zeta_derivative_ref: sigma must be positive");
  if (j < 0 || j > kMaxRefOrder) throw DomainError("zeta_derivative_ref: j must be in [0, 8]");
  if (sigma == 1.0 && t == 0.0) throw DomainError("zeta_derivative_ref: pole at s = 1");
  return with_precision(precision_bits, [&](auto tag) {
    return zeta_ref_impl<decltype(tag)>(j, sigma, t, precision_bits);
  });
}

std::complex<double> zeta_derivative_ref(int j, double sigma, double t, int precision_bits) {
  return zeta_derivative_ref_detailed(j, sigma, t, precision_bits).value;
}

SecondMoment continuous_second_moment(int j, double sigma, double big_t, int samples) {
  if (!(sigma > 0.5)) throw DomainError("second moment: sigma must exceed 1/2");
  if (big_t < 100) throw DomainError("second moment: T must be >= 100");
  if (samples < 1) throw DomainError("second moment: samples must be positive");
  if (2 * j > kMaxRefOrder) throw DomainError("second moment: 2j must be <= 8");

  SecondMoment out;
  out.predicted = std::abs(zeta_derivative_ref(2 * j, 2.0 * sigma, 0.0));
  int panels = samples;
  double prev = second_moment_level(j, sigma, big_t, panels);
  for (int level = 0; level < 4; ++level) {
    panels *= 2;
    const double cur = second_moment_level(j, sigma, big_t, panels);
    if (std::abs(cur - prev) <= 1e-7 * std::abs(cur)) {
      out.mean = cur;
      out.panels = panels;
      return out;
    }
    prev = cur;
  }
  throw QuadratureFailure("second moment: refinement budget exceeded");
}

double lemma1_residual_ratio(int j, double sigma, double t, const EvalConfig& config) {
  EvalConfig unit = config;
  unit.error_constant = 1.0;
  const ZetaSample approx = zeta_derivative_approx(j, sigma, t, unit);
  const std::complex<double> ref = zeta_derivative_ref(j, sigma, t, 64);
  return std::abs(approx.value - ref) / approx.error_bound;
}

double calibrate_lemma1_constant(const Lemma1Sweep& sweep) {
  double worst = 0;
  for (std::int64_t big_t : sweep.truncations) {
    EvalConfig config;
    config.truncation = big_t;
    config.epsilon = sweep.epsilon;
    for (double sigma : sweep.sigmas) {
      for (int j : sweep.orders) {
        for (int i = 0; i < sweep.points; ++i) {
          const double frac = sweep.points > 1 ? static_cast<double>(i) / (sweep.points - 1) : 0.0;
          const double t = static_cast<double>(big_t) * (1.0 + frac);
          worst = std::max(worst, lemma1_residual_ratio(j, sigma, t, config));
        }
      }
    }
  }
  return worst;
}

Lemma1Suite lemma1_random_suite(int cases, std::uint64_t seed, double constant) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sig(0.6, 1.2), frac(0.0, 1.0);
  std::uniform_int_distribution<int> order(0, 3), big(0, 1);
  Lemma1Suite out;
  for (int i = 0; i < cases; ++i) {
    const double sigma = sig(rng);
    const int j = order(rng);
    EvalConfig config;
    config.truncation = big(rng) ? 10000 : 1000;
    config.error_constant = constant;
    const double t = static_cast<double>(config.truncation) * (1.0 + frac(rng));
    const ZetaSample approx = zeta_derivative_approx(j, sigma, t, config);
    const double err = std::abs(approx.value - zeta_derivative_ref(j, sigma, t, 64));
    out.worst_ratio = std::max(out.worst_ratio, err / approx.error_bound);
    ++out.cases;
    if (err <= approx.error_bound) ++out.passed;
  }
  return out;
}

}  // namespace zres
