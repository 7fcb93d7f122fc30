#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "zres/dickman_bounds.hpp"

using namespace zres;

namespace {

// Independent route to D_j(A): the Laplace transform of rho is
//   int_0^inf e^{Au} rho(u) du = exp(gamma + sum_{k>=1} A^k / (k k!)),
// so D_j(A) is the j-th A-derivative of that closed form. Taylor
// coefficients in h of F(A + h) are expanded directly, then exponentiated.
double laplace_moment(int j, double a) {
  const int terms = 200;
  std::vector<long double> f(j + 1, 0.0L);
  // binom(k, m) A^{k-m} / (k k!)
  for (int k = 1; k < terms; ++k) {
    long double base = 1.0L;
    for (int i = 1; i <= k; ++i) base /= i;
    base /= k;
    for (int m = 0; m <= std::min(j, k); ++m) {
      long double c = base;
      for (int i = 0; i < m; ++i) c *= static_cast<long double>(k - i) / (i + 1);
      c *= std::pow(static_cast<long double>(a), k - m);
      f[m] += c;
    }
  }
  std::vector<long double> g(j + 1, 0.0L);
  g[0] = std::exp(std::numbers::egamma_v<long double> + f[0]);
  for (int n = 1; n <= j; ++n) {
    long double s = 0;
    for (int m = 1; m <= n; ++m) s += m * f[m] * g[n - m];
    g[n] = s / n;
  }
  long double fact = 1;
  for (int i = 2; i <= j; ++i) fact *= i;
  return static_cast<double>(fact * g[j]);
}

}  // namespace

TEST_CASE("rho is identically one on [0, 1]") {
  for (double u : {0.0, 0.25, 0.5, 0.999, 1.0}) CHECK(dickman_rho(u) == 1.0);
}

TEST_CASE("rho matches 1 - log u on [1, 2]") {
  CHECK(std::abs(dickman_rho(2.0) - (1.0 - std::log(2.0))) < 1e-10);
  const auto& table = dickman_table();
  for (int i = 0; i <= 200; ++i) {
    const double u = 1.0 + i / 200.0 + 1e-4 * (i % 7);
    if (u > 2.0) continue;
    CHECK(std::abs(static_cast<double>(table.rho(u)) - (1.0 - std::log(u))) <= 1e-13);
  }
}

TEST_CASE("rho(3) against the quadrature oracle") {
  // 1 - log 2 - int_2^3 (1 - log(v-1))/v dv, mpmath quad at 40 digits.
  CHECK(std::abs(dickman_rho(3.0) - 0.04860838829113157) < 1e-13);
}

TEST_CASE("rho table shape") {
  const auto& table = dickman_table();
  CHECK(table.error_estimate() < 1e-13);
  const auto& v = table.values();
  for (std::size_t i = 1025; i < v.size(); ++i) {
    CHECK(v[i] < v[i - 1]);
    CHECK(v[i] > 0);
  }
  // Continuity at u = 1.
  CHECK(std::abs(static_cast<double>(table.rho(1.0 - 1e-9) - table.rho(1.0 + 1e-9))) < 1e-8);
  // rho(10) = 2.77017183772596e-11 (classical tabulation).
  CHECK(static_cast<double>(table.rho(10.0)) == doctest::Approx(2.77017183772596e-11).epsilon(1e-9));
}

TEST_CASE("rho beyond the table needs extension") {
  CHECK_THROWS_AS(dickman_rho(20.5), DomainError);
  CHECK_THROWS_AS(dickman_rho(-1.0), DomainError);
}

TEST_CASE("D_0(0) equals e^gamma") {
  const QuadratureResult r = d_j_of_A(0, 0.0);
  CHECK(std::abs(r.value - 1.7810724179901980) < 1e-10);
  CHECK(r.error < 1e-10);
}

TEST_CASE("laplace oracle sanity") {
  CHECK(laplace_moment(0, 0.0) == doctest::Approx(1.7810724179901980).epsilon(1e-15));
}

TEST_CASE("D_j(A) agrees with the Laplace-transform oracle") {
  for (int j : {0, 1, 2, 3, 5, 8, 12}) {
    for (double a : {0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0}) {
      const double want = laplace_moment(j, a);
      const QuadratureResult r = d_j_of_A(j, a, 1e-6 * want);
      CAPTURE(j);
      CAPTURE(a);
      CHECK(r.value == doctest::Approx(want).epsilon(1e-11));
    }
  }
}

TEST_CASE("Y_j is D_j at A = 0 and D_j grows with A") {
  for (int j = 0; j <= 12; ++j) {
    CHECK(y_j(j, 1e-6) == d_j_of_A(j, 0.0, 1e-6).value);
    CHECK(d_j_of_A(j, 0.5, 1.0).value > d_j_of_A(j, 0.0, 1.0).value);
  }
  CHECK(d_j_of_A(0, 0.5).value > 1.7810724179901980);
  double prev = 0;
  for (double a = 0; a <= 4.0; a += 0.25) {
    const double v = d_j_of_A(0, a, 1.0).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("D_j(A) step halving stays within the reported error") {
  for (int j : {0, 2, 6}) {
    const QuadratureResult r = d_j_of_A(j, 1.0, 1e-6);
    CHECK(r.error < 1e-8 * r.value);
  }
}

TEST_CASE("D_j(A) rejects A outside [0, 4] and unreachable accuracy") {
  CHECK_THROWS_AS(d_j_of_A(0, 4.5), DomainError);
  CHECK_THROWS_AS(d_j_of_A(0, -0.1), DomainError);
  CHECK_THROWS_AS(d_j_of_A(-1, 0.0), DomainError);
  CHECK_THROWS_AS(d_j_of_A(12, 4.0, 1e-300), QuadratureFailure);
}

TEST_CASE("lambda(A) closed form") {
  // 1/(sqrt 2 (e - 1)), mpmath: 0.41151967591991630951...
  CHECK(std::abs(lambda_of_A(0.0) - 0.41151967591991631) < 1e-12);
  const double manual = 1.0 / (std::sqrt(2.0) * (std::numbers::e - 1.0));
  CHECK(std::abs(lambda_of_A(0.0) - manual) < 1e-12);
  for (double a : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(std::abs(lambda_of_A(a) / lambda_of_A(a + 1) - std::numbers::e) < 1e-12);
  }
  double prev = lambda_of_A(0.0);
  for (double a = 0.5; a < 40; a += 0.5) {
    CHECK(lambda_of_A(a) < prev);
    prev = lambda_of_A(a);
  }
  CHECK(lambda_of_A(40.0) < 1e-17);
}
