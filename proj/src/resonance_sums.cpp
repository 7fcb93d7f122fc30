#include "zres/resonance_sums.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

#include "zres/dickman_bounds.hpp"
#include "zres/errors.hpp"
#include "zres/numeric.hpp"
#include "zres/parallel.hpp"
#include "zres/zeta_eval.hpp"

namespace zres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long double kTwoPiL = 2 * std::numbers::pi_v<long double>;
constexpr int kChunk = 256;

double transition(double v, double s) {
  if (v <= 0) return 0;
  if (v >= 1) return 1;
  const double e = s / v - s / (1 - v);
  if (e > 700) return 0;
  return 1 / (1 + std::exp(e));
}

// sum_i coef[i] e^{-i alpha l log_i} for l = l0 .. l0 + len - 1, written to
// re/im. Phases reseeded exactly at l0 and rotated in between.
void rotated_block(const std::vector<double>& coef, const std::vector<long double>& logs,
                   long double alpha, std::int64_t l0, int len, double* re, double* im) {
  std::fill(re, re + len, 0.0);
  std::fill(im, im + len, 0.0);
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (coef[i] == 0) continue;
    const long double step = std::fmod(alpha * logs[i], kTwoPiL);
    const long double seed = std::fmod(step * static_cast<long double>(l0), kTwoPiL);
    double zr = coef[i] * static_cast<double>(std::cos(seed));
    double zi = -coef[i] * static_cast<double>(std::sin(seed));
    const double wr = static_cast<double>(std::cos(step));
    const double wi = -static_cast<double>(std::sin(step));
    for (int k = 0; k < len; ++k) {
      re[k] += zr;
      im[k] += zi;
      const double nr = zr * wr - zi * wi;
      zi = zr * wi + zi * wr;
      zr = nr;
    }
  }
}

struct Dirichlet {
  std::vector<double> coef;
  std::vector<long double> logs;
};

Dirichlet dirichlet_terms(int j, double sigma, std::int64_t len) {
  Dirichlet d;
  d.coef.reserve(static_cast<std::size_t>(std::max<std::int64_t>(len, 0)));
  for (std::int64_t n = 1; n <= len; ++n) {
    const long double ln = std::log(static_cast<long double>(n));
    d.logs.push_back(ln);
    d.coef.push_back(static_cast<double>(std::pow(ln, j) * std::exp(-sigma * ln)));
  }
  return d;
}

struct ChunkSums {
  CompensatedSum<double> s1;
  CompensatedComplexSum<double> s2, e1, e2, window;
};

std::complex<double> to_std(const CompensatedComplexSum<double>& s) { return s.value().to_std(); }

}  // namespace

std::string WeightKernel::name() const { return kind == KernelKind::Gaussian ? "gaussian" : "bump"; }

double kernel_value(const WeightKernel& k, double y) {
  if (k.kind == KernelKind::Gaussian) return std::exp(-0.5 * y * y);
  if (y <= 1 || y >= 2) return 0;
  if (y >= 1.25 && y <= 1.75) return 1;
  const double s = k.transition_sharpness;
  return y < 1.5 ? transition(4 * (y - 1), s) : transition(4 * (2 - y), s);
}

double kernel_transform_centered(const WeightKernel& k, double xi) {
  if (k.kind == KernelKind::Gaussian) {
    return std::sqrt(2 * kPi) * std::exp(-2 * kPi * kPi * xi * xi);
  }
  if (!(k.transition_sharpness > 0)) throw DomainError("transition sharpness must be positive");
  xi = std::abs(xi);
  const double plateau = xi == 0 ? 0.5 : std::sin(kPi * xi / 2) / (kPi * xi);
  const double s = k.transition_sharpness;
  auto f = [&](double u) { return transition(4 * (0.5 - u), s) * std::cos(2 * kPi * xi * u); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  // panels doubled until the summed Kronrod error estimate fits the budget
  for (int panels = std::max(4, static_cast<int>(std::ceil(xi / 2))); panels <= (1 << 16); panels *= 2) {
    double total = 0, err_total = 0;
    for (int p = 0; p < panels; ++p) {
      const double a = 0.25 + 0.25 * p / panels;
      const double b = 0.25 + 0.25 * (p + 1) / panels;
      double err = 0;
      total += GK::integrate(f, a, b, 0, 0.0, &err);
      err_total += err;
    }
    if (2 * err_total < 1e-12) return plateau + 2 * total;
  }
  throw QuadratureFailure("bump transform: error budget exceeded");
}

std::complex<double> kernel_transform(const WeightKernel& k, double xi) {
  const double c = kernel_transform_centered(k, xi);
  if (k.kind == KernelKind::Gaussian) return {c, 0.0};
  const double phase = 3 * kPi * std::fmod(xi, 2.0);
  return {c * std::cos(phase), -c * std::sin(phase)};
}

double fit_decay_constant(const WeightKernel& k, int nu, double xi_lo, double xi_hi, int samples) {
  if (!(xi_lo > 0 && xi_hi > xi_lo) || samples < 2) throw DomainError("fit_decay_constant: bad grid");
  double best = 0;
  const double r = std::log(xi_hi / xi_lo);
  for (int i = 0; i < samples; ++i) {
    const double xi = xi_lo * std::exp(r * i / (samples - 1));
    best = std::max(best, std::abs(kernel_transform_centered(k, xi)) * std::pow(xi, nu));
  }
  return best;
}

ResonatorTerms ResonatorTerms::from(const ResonatorNearHalf& r) {
  ResonatorTerms t;
  t.factored = r.support;
  for (std::size_t i = 0; i < r.support.size(); ++i) {
    t.log_m.push_back(r.support[i].log_value);
    t.weights.push_back(static_cast<double>(r.weights[i]));
  }
  return t;
}

ResonatorTerms ResonatorTerms::from(const ResonatorNearOne& r) {
  ResonatorTerms t;
  t.values = r.members;
  for (std::int64_t m : r.members) {
    t.log_m.push_back(std::log(static_cast<long double>(m)));
    t.weights.push_back(1.0);
  }
  return t;
}

ResonatorTerms ResonatorTerms::unit() {
  ResonatorTerms t;
  t.values = {1};
  t.log_m = {0.0L};
  t.weights = {1.0};
  return t;
}

long double ResonatorTerms::log_ratio(std::size_t a, std::size_t b) const {
  if (!factored.empty()) return zres::log_ratio(factored[a], factored[b]);
  if (!values.empty()) {
    return std::log(static_cast<long double>(values[a])) - std::log(static_cast<long double>(values[b]));
  }
  return log_m[a] - log_m[b];
}

std::complex<double> ResonatorTerms::eval(double t) const {
  CompensatedComplexSum<long double> s;
  for (std::size_t i = 0; i < size(); ++i) {
    const long double ph = std::fmod(static_cast<long double>(t) * log_m[i], kTwoPiL);
    s.add(Complex<long double>(weights[i] * std::cos(ph), -weights[i] * std::sin(ph)));
  }
  return s.value().to_std();
}

double ResonatorTerms::weight_square_sum() const {
  CompensatedSum<double> s;
  for (double w : weights) s.add(w * w);
  return s.value();
}

std::complex<double> dirichlet_polynomial(int j, double sigma, double t, std::int64_t len) {
  CompensatedComplexSum<long double> s;
  for (std::int64_t n = 1; n <= len; ++n) {
    const long double ln = std::log(static_cast<long double>(n));
    const long double mag = std::pow(ln, j) * std::exp(-sigma * ln);
    const long double ph = std::fmod(static_cast<long double>(t) * ln, kTwoPiL);
    s.add(Complex<long double>(mag * std::cos(ph), -mag * std::sin(ph)));
  }
  return s.value().to_std();
}

std::int64_t gaussian_truncation_radius(std::int64_t n) {
  const long double c = std::log(static_cast<long double>(n)) / n;
  return static_cast<std::int64_t>(std::floor(std::sqrt(2 * std::log(1e18L)) / c));
}

SumReport resonance_sums(const ResonatorTerms& r, const ProgressionParams& params, double sigma,
                         std::int64_t truncation) {
  const std::int64_t n = params.n_range;
  if (n < kMinNForLog3) throw DomainError("resonance_sums: N must be >= 16");
  if (!(params.alpha > 0)) throw DomainError("resonance_sums: alpha must be positive");
  if (truncation <= 0) truncation = static_cast<std::int64_t>(std::floor(params.alpha * n));
  const std::int64_t radius = gaussian_truncation_radius(n);
  const long double c = std::log(static_cast<long double>(n)) / n;
  const Dirichlet d = dirichlet_terms(params.j, sigma, truncation);

  const long chunks = static_cast<long>(radius / kChunk + 1);
  std::vector<ChunkSums> slots(chunks);
  parallel_chunks(chunks, [&](long ci) {
    const std::int64_t l0 = static_cast<std::int64_t>(ci) * kChunk;
    const int len = static_cast<int>(std::min<std::int64_t>(kChunk, radius - l0 + 1));
    std::vector<double> dre(len), dim(len), rre(len), rim(len);
    rotated_block(d.coef, d.logs, params.alpha, l0, len, dre.data(), dim.data());
    rotated_block(r.weights, r.log_m, params.alpha, l0, len, rre.data(), rim.data());
    ChunkSums& out = slots[ci];
    for (int k = 0; k < len; ++k) {
      const std::int64_t l = l0 + k;
      const double phi = static_cast<double>(std::exp(-0.5L * (l * c) * (l * c)));
      const double w = (rre[k] * rre[k] + rim[k] * rim[k]) * phi;
      const Complex<double> t(dre[k] * w, dim[k] * w);
      auto& bucket = (l * l < n) ? out.e1 : (l <= n ? out.window : out.e2);
      // l, then -l with D(-t) = conj D(t) and |R(-t)| = |R(t)|
      out.s1.add(w);
      out.s2.add(t);
      bucket.add(t);
      if (l != 0) {
        out.s1.add(w);
        out.s2.add(t.conj());
        bucket.add(t.conj());
      }
    }
  });

  ChunkSums total;
  for (const ChunkSums& s : slots) {
    total.s1.add(s.s1.value());
    total.s2.add(s.s2.value());
    total.e1.add(s.e1.value());
    total.e2.add(s.e2.value());
    total.window.add(s.window.value());
  }
  SumReport rep;
  rep.kernel = "gaussian";
  rep.s1 = total.s1.value();
  rep.s2 = to_std(total.s2);
  rep.e1 = to_std(total.e1);
  rep.e2 = to_std(total.e2);
  rep.window = to_std(total.window);
  rep.ratio = std::abs(rep.s2) / rep.s1;
  rep.truncation_radius = radius;
  rep.weight_square_sum = r.weight_square_sum();
  const LogScales ls = log_scales(n);
  rep.theoretical_bound = static_cast<double>(
      std::exp(lambda_of_A(params.a_param) * std::sqrt(ls.log1 * ls.log3 / ls.log2)));
  return rep;
}

double sum_S1(const ResonatorTerms& r, const ProgressionParams& params) {
  return resonance_sums(r, params, 1.0, 1).s1;
}

std::complex<double> sum_S2(const ResonatorTerms& r, const ProgressionParams& params, double sigma,
                            std::int64_t truncation) {
  return resonance_sums(r, params, sigma, truncation).s2;
}

std::complex<double> error_E1(const ResonatorTerms& r, const ProgressionParams& params, double sigma,
                              std::int64_t truncation) {
  return resonance_sums(r, params, sigma, truncation).e1;
}

std::complex<double> error_E2(const ResonatorTerms& r, const ProgressionParams& params, double sigma,
                              std::int64_t truncation) {
  return resonance_sums(r, params, sigma, truncation).e2;
}

SumReport bump_sums(const ResonatorTerms& r, const ProgressionParams& params, double sigma,
                    const WeightKernel& kernel, std::int64_t truncation) {
  if (kernel.kind != KernelKind::Bump) throw DomainError("bump_sums: kernel must be Bump");
  const std::int64_t n = params.n_range;
  if (n < kMinNForLog3) throw DomainError("bump_sums: N must be >= 16");
  if (!(params.alpha > 0)) throw DomainError("bump_sums: alpha must be positive");
  if (truncation <= 0) truncation = static_cast<std::int64_t>(std::floor(2 * params.alpha * n));
  const Dirichlet d = dirichlet_terms(params.j, sigma, truncation);

  const std::int64_t first = n + 1, last = 2 * n - 1;
  const long chunks = static_cast<long>((last - first) / kChunk + 1);
  std::vector<ChunkSums> slots(chunks);
  parallel_chunks(chunks, [&](long ci) {
    const std::int64_t l0 = first + static_cast<std::int64_t>(ci) * kChunk;
    const int len = static_cast<int>(std::min<std::int64_t>(kChunk, last - l0 + 1));
    std::vector<double> dre(len), dim(len), rre(len), rim(len);
    rotated_block(d.coef, d.logs, params.alpha, l0, len, dre.data(), dim.data());
    rotated_block(r.weights, r.log_m, params.alpha, l0, len, rre.data(), rim.data());
    ChunkSums& out = slots[ci];
    for (int k = 0; k < len; ++k) {
      const double phi = kernel_value(kernel, static_cast<double>(l0 + k) / n);
      const double w = (rre[k] * rre[k] + rim[k] * rim[k]) * phi;
      out.s1.add(w);
      out.s2.add(Complex<double>(dre[k] * w, dim[k] * w));
    }
  });
  ChunkSums total;
  for (const ChunkSums& s : slots) {
    total.s1.add(s.s1.value());
    total.s2.add(s.s2.value());
  }

  // sum over pairs with n = k m, k <= truncation
  CompensatedSum<long double> diag;
  const long double log_trunc = std::log(static_cast<long double>(truncation)) + 1e-12L;
  for (std::size_t b = 0; b < r.size(); ++b) {
    for (std::size_t a = 0; a < r.size(); ++a) {
      bool divides;
      if (!r.factored.empty()) {
        divides = r.factored[a].divides(r.factored[b]);
      } else if (!r.values.empty()) {
        divides = r.values[b] % r.values[a] == 0;
      } else {
        throw DomainError("bump_sums: resonator has no exact representation");
      }
      if (!divides) continue;
      const long double lk = r.log_ratio(b, a);
      if (lk > log_trunc) continue;
      diag.add(static_cast<long double>(r.weights[a]) * r.weights[b] * std::exp(-sigma * lk) *
               std::pow(lk, params.j));
    }
  }

  SumReport rep;
  rep.kernel = "bump";
  rep.s1 = total.s1.value();
  rep.s2 = to_std(total.s2);
  rep.window = rep.s2;
  rep.ratio = std::abs(rep.s2) / rep.s1;
  rep.truncation_radius = last;
  rep.weight_square_sum = r.weight_square_sum();
  rep.diagonal_main_term =
      static_cast<double>(n * kernel_transform_centered(kernel, 0.0) * diag.value());
  const LogScales ls = log_scales(n);
  rep.theoretical_bound = d_j_of_A(params.j, params.a_param, 1e-8).value *
                          std::pow(static_cast<double>(ls.log2), params.j + 1);
  return rep;
}

double offdiagonal_kernel_max(const ResonatorNearOne& r, const ProgressionParams& params,
                              const WeightKernel& kernel) {
  const double n = static_cast<double>(params.n_range);
  const std::int64_t k_max = static_cast<std::int64_t>(std::floor(2 * params.alpha * n));
  const long double period = kTwoPiL / params.alpha;
  const long double log_kmax = std::log(static_cast<long double>(k_max));
  // kernel arguments N |alpha theta / 2 pi - q| at the k nearest to each resonance
  std::vector<double> args;
  for (std::int64_t m : r.members) {
    for (std::int64_t nn : r.members) {
      const long double base = std::log(static_cast<long double>(nn) / m);
      // log k = base - q period must land in [0, log k_max]
      const long double q_lo = std::ceil((base - log_kmax) / period) - 1;
      const long double q_hi = std::floor(base / period) + 1;
      for (long double q = q_lo; q <= q_hi; ++q) {
        const long double centre = std::exp(base - q * period);
        for (long double kk : {std::floor(centre), std::floor(centre) + 1}) {
          if (kk < 1 || kk > k_max) continue;
          const std::int64_t k = static_cast<std::int64_t>(kk);
          if (k * m == nn) continue;
          const long double theta = std::log(static_cast<long double>(nn) / (static_cast<long double>(k) * m));
          const long double x = params.alpha * theta / kTwoPiL;
          args.push_back(static_cast<double>(n * std::abs(x - std::nearbyint(x))));
        }
      }
    }
  }
  std::sort(args.begin(), args.end());
  args.erase(std::unique(args.begin(), args.end()), args.end());
  const double c4 = fit_decay_constant(kernel, 4);
  double best = 0;
  for (double xi : args) {
    if (xi > 1 && c4 * std::pow(xi, -4.0) < best) break;
    best = std::max(best, std::abs(kernel_transform_centered(kernel, xi)));
  }
  return best;
}

double poisson_discrepancy(long double theta, const ProgressionParams& params, int modes) {
  const std::int64_t n = params.n_range;
  const long double c = std::log(static_cast<long double>(n)) / n;
  const std::int64_t radius = gaussian_truncation_radius(n);
  const long double step = std::fmod(params.alpha * theta, kTwoPiL);
  CompensatedComplexSum<long double> lhs;
  lhs.add(Complex<long double>(1.0L, 0.0L));
  for (std::int64_t l = 1; l <= radius; ++l) {
    const long double phi = std::exp(-0.5L * (l * c) * (l * c));
    const long double ph = std::fmod(step * l, kTwoPiL);
    const long double re = phi * std::cos(ph), im = phi * std::sin(ph);
    lhs.add(Complex<long double>(re, -im));
    lhs.add(Complex<long double>(re, im));
  }
  const long double delta = params.alpha * theta / kTwoPiL;
  const long double k0 = std::nearbyint(-delta);
  CompensatedSum<long double> rhs;
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = -modes; i <= modes; ++i) {
    const long double xi = (k0 + i + delta) / c;
    rhs.add(std::sqrt(2 * pi) * std::exp(-2 * pi * pi * xi * xi) / c);
  }
  const Complex<long double> l = lhs.value();
  return static_cast<double>(std::hypot(l.re - rhs.value(), l.im));
}

PoissonResult poisson_check(const ResonatorTerms& r, const ProgressionParams& params, int pairs,
                            int modes, std::uint64_t seed) {
  if (r.size() == 0) throw DomainError("poisson_check: empty resonator");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, r.size() - 1);
  PoissonResult res;
  for (int i = 0; i < pairs; ++i) {
    std::size_t a = 0, b = 0;
    if (i > 0) {
      a = pick(rng);
      b = pick(rng);
    }
    res.max_discrepancy = std::max(res.max_discrepancy, poisson_discrepancy(r.log_ratio(a, b), params, modes));
    ++res.pairs;
  }
  return res;
}

SampledFunction sample_function(const ComplexFunction& g, const ComplexFunction& dg, std::int64_t w,
                                std::int64_t v, int per_unit) {
  if (per_unit <= 0 || v <= w) throw DomainError("sample_function: bad grid");
  SampledFunction f{w, v, per_unit, {}, {}};
  const std::int64_t count = (v - w) * per_unit;
  for (std::int64_t i = 0; i <= count; ++i) {
    const double t = static_cast<double>(w) + static_cast<double>(i) / per_unit;
    f.g.push_back(g(t));
    f.dg.push_back(dg(t));
  }
  return f;
}

GallagherResult gallagher_check(const SampledFunction& f, double constant) {
  if (f.v - f.w <= 2) throw DomainError("gallagher_check: need V - W > 2");
  const std::int64_t count = (f.v - f.w) * f.per_unit;
  if (f.per_unit < 4 || f.per_unit % 2 != 0 || static_cast<std::int64_t>(f.g.size()) != count + 1 ||
      f.dg.size() != f.g.size()) {
    throw DomainError("gallagher_check: insufficient sampling grid");
  }
  const double h = 1.0 / f.per_unit;
  auto simpson = [&](const std::vector<std::complex<double>>& y) {
    CompensatedSum<double> s;
    for (std::int64_t i = 0; i <= count; ++i) {
      const double wgt = (i == 0 || i == count) ? 1 : (i % 2 ? 4 : 2);
      s.add(wgt * std::norm(y[i]));
    }
    return s.value() * h / 3;
  };
  GallagherResult r;
  r.integral_g2 = simpson(f.g);
  r.integral_dg2 = simpson(f.dg);
  CompensatedSum<double> lhs;
  for (std::int64_t k = 1; k < f.v - f.w; ++k) lhs.add(std::norm(f.g[k * f.per_unit]));
  r.lhs = lhs.value();
  r.rhs = r.integral_g2 + std::sqrt(r.integral_g2 * r.integral_dg2);
  r.pass = r.lhs <= constant * r.rhs;
  return r;
}

SampledFunction zeta_sample_path(int j, double sigma, double alpha, std::int64_t w, std::int64_t v,
                                 int per_unit) {
  auto g = [=](double t) { return zeta_derivative_ref(j, sigma, alpha * t); };
  auto dg = [=](double t) {
    return std::complex<double>(0, alpha) * zeta_derivative_ref(j + 1, sigma, alpha * t);
  };
  return sample_function(g, dg, w, v, per_unit);
}

namespace {

struct PathSpec {
  int j;
  double sigma, alpha;
  std::int64_t w, v;
};

std::vector<PathSpec> gallagher_paths(const GallagherSweep& sweep) {
  std::mt19937_64 rng(sweep.seed);
  std::uniform_real_distribution<double> sig(0.55, 1.2), alp(0.5, 2.0);
  std::uniform_int_distribution<int> jj(0, 2), ww(10, 500), len(10, 40);
  std::vector<PathSpec> out;
  for (int i = 0; i < sweep.paths; ++i) {
    PathSpec p;
    p.sigma = sig(rng);
    p.j = jj(rng);
    p.alpha = alp(rng);
    p.w = ww(rng);
    p.v = p.w + len(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<GallagherResult> gallagher_suite(const GallagherSweep& sweep, double constant) {
  const std::vector<PathSpec> paths = gallagher_paths(sweep);
  std::vector<GallagherResult> out(paths.size());
  parallel_chunks(static_cast<long>(paths.size()), [&](long i) {
    const PathSpec& p = paths[i];
    out[i] = gallagher_check(zeta_sample_path(p.j, p.sigma, p.alpha, p.w, p.v), constant);
  });
  return out;
}

double calibrate_gallagher_constant(const GallagherSweep& sweep) {
  double best = 0;
  for (const GallagherResult& r : gallagher_suite(sweep)) best = std::max(best, r.lhs / r.rhs);
  return best;
}

double discrete_mean_square(int j, double sigma, double alpha, std::int64_t n) {
  if (n < 1) throw DomainError("discrete_mean_square: N must be positive");
  const long chunks = static_cast<long>((n + kChunk - 1) / kChunk);
  std::vector<double> slots(chunks);
  parallel_chunks(chunks, [&](long ci) {
    CompensatedSum<double> s;
    const std::int64_t lo = 1 + static_cast<std::int64_t>(ci) * kChunk;
    const std::int64_t hi = std::min<std::int64_t>(n, lo + kChunk - 1);
    for (std::int64_t l = lo; l <= hi; ++l) s.add(std::norm(zeta_derivative_ref(j, sigma, alpha * l)));
    slots[ci] = s.value();
  });
  CompensatedSum<double> s;
  for (double v : slots) s.add(v);
  return s.value() / n;
}

}  // namespace zres
