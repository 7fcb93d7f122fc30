#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "zres/zeta_eval.hpp"

using namespace zres;
using cd = std::complex<double>;

namespace {

// Values below were computed with mpmath (mp.dps = 40) before the build.
constexpr double kZeta2 = 1.6449340668482264;
constexpr double kZetaPrime2 = -0.93754825431584375;
constexpr double kFirstZero = 14.134725141734693790;

void check_close(cd got, cd want, double tol) {
  CAPTURE(got);
  CAPTURE(want);
  CHECK(std::abs(got - want) < tol);
}

}  // namespace

TEST_CASE("dirichlet_partial_sum trivial cases") {
  check_close(dirichlet_partial_sum(0, 2.0, 0.0, 1), 1.0, 1e-15);
  for (int j = 1; j <= 4; ++j) {
    check_close(dirichlet_partial_sum(j, 0.7, 123.4, 1), 0.0, 0.0 + 1e-300);
  }
}

TEST_CASE("dirichlet_partial_sum at sigma=2 approaches zeta(2) within the tail bound") {
  const cd s = dirichlet_partial_sum(0, 2.0, 0.0, 1000000);
  CHECK(s.real() < kZeta2);
  CHECK(kZeta2 - s.real() <= 1e-6);
  CHECK(s.real() == doctest::Approx(1.6449330668487264).epsilon(1e-13));
  CHECK(std::abs(s.imag()) < 1e-300);
}

TEST_CASE("dirichlet_partial_sum with j=0, t=0, sigma>1 is increasing and bounded by zeta") {
  double prev = 0;
  for (std::int64_t t = 1; t <= 4096; t *= 2) {
    const double v = dirichlet_partial_sum(0, 1.5, 0.0, t).real();
    CHECK(v > prev);
    CHECK(v < 2.6123753486854883);
    prev = v;
  }
}

TEST_CASE("dirichlet_partial_sum agrees across working precisions") {
  const cd lo = dirichlet_partial_sum(2, 0.8, 5000.5, 3000, 53);
  const cd hi = dirichlet_partial_sum(2, 0.8, 5000.5, 3000, 113);
  check_close(lo, hi, 1e-10);
}

TEST_CASE("reference evaluator golden values") {
  check_close(zeta_derivative_ref(0, 2.0, 0.0, 106), kZeta2, 1e-12);
  check_close(zeta_derivative_ref(1, 2.0, 0.0, 106), kZetaPrime2, 1e-12);
  CHECK(std::abs(zeta_derivative_ref(0, 0.5, kFirstZero, 64)) < 1e-6);

  check_close(zeta_derivative_ref(0, 2.0, 10000.0),
              {0.92231553990021107, -0.25836255532538142}, 1e-8);
  check_close(zeta_derivative_ref(1, 2.0, 10000.0),
              {0.15790605491781619, 0.20346115374952822}, 1e-8);
  check_close(zeta_derivative_ref(0, 0.9, 15000.0),
              {0.38630437680557773, 0.32019636084494916}, 1e-8);
  check_close(zeta_derivative_ref(1, 0.9, 15000.0),
              {0.95530831603520391, 0.31566915291682312}, 1e-8);
  check_close(zeta_derivative_ref(0, 0.75, 100.0),
              {2.0029919952553958, -0.054392071190092587}, 1e-8);
  check_close(zeta_derivative_ref(1, 0.75, 100.0),
              {-1.9810456733090335, -0.087794024532243837}, 1e-8);
  check_close(zeta_derivative_ref(3, 0.6, 1234.5),
              {-53.426822914190578, -103.26129689981880}, 1e-6);
  check_close(zeta_derivative_ref(2, 1.2, 20000.0),
              {0.12743492573361021, -0.18606281709660474}, 1e-8);
  check_close(zeta_derivative_ref(1, 0.55, 7777.7),
              {-30.346257725115848, -3.0107423257556502}, 1e-7);
  check_close(zeta_derivative_ref(0, 5.0, 0.0, 106), 1.0369277551433699, 1e-12);
}

TEST_CASE("reference evaluator reports its certificate") {
  const ReferenceValue r = zeta_derivative_ref_detailed(2, 0.75, 500.0, 64);
  CHECK(r.remainder_bound <= std::ldexp(1.0, -32));
  CHECK(r.cutoff >= 16);
  CHECK(r.corrections >= 1);
  CHECK(r.corrections <= 30);
}

TEST_CASE("reference evaluator domain errors") {
  CHECK_THROWS_AS(zeta_derivative_ref(0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(zeta_derivative_ref(9, 0.7, 10.0), DomainError);
  CHECK_THROWS_AS(zeta_derivative_ref(0, 0.0, 10.0), DomainError);
  CHECK_THROWS_AS(zeta_derivative_ref(0, 0.7, 10.0, 200), PrecisionUnattainable);
  // Near the pole the value is large but finite.
  const cd near = zeta_derivative_ref(0, 1.0 + 1e-6, 0.0, 64);
  CHECK(near.real() == doctest::Approx(1e6 + 0.5772156649).epsilon(1e-9));
}

TEST_CASE("reference evaluator conjugate symmetry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sig(0.55, 2.0), tt(1.0, 3000.0);
  for (int i = 0; i < 30; ++i) {
    const double s = sig(rng), t = tt(rng);
    const int j = i % 4;
    const cd a = zeta_derivative_ref(j, s, t);
    const cd b = zeta_derivative_ref(j, s, -t);
    check_close(b, std::conj(a), 1e-12 * (1 + std::abs(a)));
  }
}

TEST_CASE("finite-difference derivative consistency") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sig(0.6, 1.5), tt(10.0, 2000.0);
  for (int i = 0; i < 10; ++i) {
    const double s = sig(rng), t = tt(rng);
    const cd d1 = zeta_derivative_ref(1, s, t, 64);
    const cd d3 = zeta_derivative_ref(3, s, t, 64);
    double prev_err = 0;
    for (double h : {1e-3, 1e-4}) {
      const cd fd =
          (zeta_derivative_ref(0, s + h, t, 113) - zeta_derivative_ref(0, s - h, t, 113)) / (2 * h);
      // Central difference error is h^2/6 * zeta'''.
      const double err = std::abs(fd - d1);
      CHECK(err <= h * h * (std::abs(d3) / 6.0 + 1.0) + 1e-9);
      if (prev_err > 0) CHECK(err < prev_err);
      prev_err = err;
    }
  }
}

TEST_CASE("approximation sign pattern and validation") {
  EvalConfig c;
  c.truncation = 1000;
  c.epsilon = 0.1;
  const ZetaSample s = zeta_derivative_approx(2, 3.0, 0.0, c, /*force=*/true);
  CHECK_FALSE(s.rigorous);
  const cd plain = dirichlet_partial_sum(2, 3.0, 0.0, 1000);
  CHECK(plain.real() > 0);
  check_close(s.value, plain, 1e-15);
  const ZetaSample odd = zeta_derivative_approx(1, 3.0, 0.0, c, true);
  check_close(odd.value, -dirichlet_partial_sum(1, 3.0, 0.0, 1000), 1e-15);

  CHECK_THROWS_AS(zeta_derivative_approx(0, 0.9, 10.0, c), DomainError);
  CHECK_THROWS_AS(zeta_derivative_approx(0, 0.55, 1500.0, c), DomainError);  // below sigma0+eps
  CHECK(zeta_derivative_approx(0, 0.9, 1500.0, c).rigorous);
}

TEST_CASE("approximation lies within the shipped error bound at the worked examples") {
  EvalConfig c;
  c.truncation = 10000;
  c.epsilon = 0.1;
  c.error_constant = kLemma1Constant;
  {
    const ZetaSample s = zeta_derivative_approx(0, 2.0, 10000.0, c);
    CHECK(std::abs(s.value - zeta_derivative_ref(0, 2.0, 10000.0)) <= s.error_bound);
  }
  {
    const ZetaSample s = zeta_derivative_approx(1, 0.9, 15000.0, c);
    CHECK(std::abs(s.value - zeta_derivative_ref(1, 0.9, 15000.0)) <= s.error_bound);
  }
}

TEST_CASE("shipped truncation constant is twice the calibration maximum") {
  const double observed = calibrate_lemma1_constant(Lemma1Sweep{});
  MESSAGE("calibrated residual ratio max = " << observed);
  CHECK(observed > 0);
  CHECK(2.0 * observed <= kLemma1Constant * (1 + 1e-3));
  CHECK(2.0 * observed >= kLemma1Constant * (1 - 1e-3));
}

TEST_CASE("continuous second moment") {
  SUBCASE("j=0, sigma=0.75") {
    const SecondMoment m = continuous_second_moment(0, 0.75, 2000.0, 2000);
    CHECK(m.predicted == doctest::Approx(2.6123753486854883).epsilon(1e-10));
    const double r = m.mean / m.predicted;
    MESSAGE("ratio " << r);
    CHECK(r >= 0.8);
    CHECK(r <= 1.2);
  }
  SUBCASE("sigma=5 is dominated by n=1") {
    const SecondMoment m = continuous_second_moment(0, 5.0, 1000.0, 500);
    CHECK(m.mean == doctest::Approx(1.0009945751278181).epsilon(1e-4));
  }
  SUBCASE("j=1, sigma=0.75") {
    const SecondMoment m = continuous_second_moment(1, 0.75, 2000.0, 2000);
    CHECK(m.predicted == doctest::Approx(15.989556371225687).epsilon(1e-9));
    const double r = m.mean / m.predicted;
    MESSAGE("ratio " << r);
    // mpmath quadrature of the same mean: 0.497645704904262.
    CHECK(r == doctest::Approx(0.497645704904262).epsilon(1e-4));
  }
  CHECK_THROWS_AS(continuous_second_moment(0, 0.75, 50.0, 10), DomainError);
}
