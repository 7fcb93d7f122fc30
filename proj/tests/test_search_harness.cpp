#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "zres/dickman_bounds.hpp"
#include "zres/search_harness.hpp"
#include "zres/zeta_eval.hpp"

using namespace zres;

namespace {

ExperimentConfig config(std::int64_t n, int j, double a, SigmaMode mode = SigmaMode::NearHalf) {
  ExperimentConfig c;
  c.params.n_range = n;
  c.params.j = j;
  c.params.a_param = a;
  c.params.sigma_mode = mode;
  c.record_timing = false;
  return c;
}

struct ThreadGuard {
  explicit ThreadGuard(const char* v) { setenv("ZRES_THREADS", v, 1); }
  ~ThreadGuard() { unsetenv("ZRES_THREADS"); }
};

}  // namespace

TEST_CASE("ceil_sqrt") {
  CHECK(ceil_sqrt(100) == 10);
  CHECK(ceil_sqrt(101) == 11);
  CHECK(ceil_sqrt(10000) == 100);
  CHECK(ceil_sqrt(1000) == 32);
}

TEST_CASE("brute_max scans [ceil sqrt N, N]") {
  ProgressionParams p;
  p.n_range = 100;
  const BruteMax lo = brute_max(p, 0.9);
  CHECK(lo.argmax >= 10);
  CHECK(lo.argmax <= 100);
  double direct = 0;
  std::int64_t where = 0;
  for (std::int64_t l = 10; l <= 100; ++l) {
    const double v = std::abs(zeta_derivative_ref(0, 0.9, double(l)));
    if (v > direct) direct = v, where = l;
  }
  CHECK(lo.value == direct);
  CHECK(lo.argmax == where);
  const BruteMax hi = brute_max(p, 0.9, 106);
  CHECK(hi.argmax == lo.argmax);
  CHECK(hi.value == doctest::Approx(lo.value).epsilon(1e-7));

  // sigma = 5: |zeta| <= zeta(5), reached where 2^{-i l} is close to 1
  const BruteMax s5 = brute_max(p, 5.0);
  const double zeta5 = 1.0369277551433699;
  CHECK(s5.value <= zeta5);
  CHECK(s5.value > 1.03);
  CHECK(std::cos(s5.argmax * std::log(2.0)) > 0.9);
}

TEST_CASE("brute_max merge is schedule independent") {
  BruteMax one, three;
  {
    ThreadGuard g("1");
    one = brute_max_range(1, 0.7, std::sqrt(2.0), 30, 2000);
  }
  {
    ThreadGuard g("3");
    three = brute_max_range(1, 0.7, std::sqrt(2.0), 30, 2000);
  }
  CHECK(one.value == three.value);
  CHECK(one.argmax == three.argmax);
  const BruteMax left = brute_max_range(1, 0.7, std::sqrt(2.0), 30, 1000);
  const BruteMax right = brute_max_range(1, 0.7, std::sqrt(2.0), 1001, 2000);
  CHECK(one.value == std::max(left.value, right.value));
  CHECK(one.argmax == (right.value > left.value ? right.argmax : left.argmax));
  CHECK_THROWS_AS(brute_max_range(0, 0.7, 1.0, 1, 100, 53, 50), BudgetExceeded);
  ProgressionParams big;
  big.n_range = 20'000'000;
  CHECK_THROWS_AS(brute_max(big, 0.7), BudgetExceeded);
}

TEST_CASE("near-half run at N = 10^4, j = 0, A = 1") {
  const ExperimentReport r = run_near_half_experiment(config(10000, 0, 1.0));
  CHECK(r.verified);
  CHECK(r.schema_version == 1);
  CHECK(r.banner == std::string(kLeadingOrderBanner));
  CHECK(r.scan_lo == 100);
  CHECK(r.scan_hi == 10000);
  CHECK(r.sum_report.kernel == "gaussian");
  CHECK(r.sum_report.brute_max >= r.lower_side - r.slack);
  CHECK(r.resonator_size <= 63);
  const LogScales ls = log_scales(10000);
  CHECK(r.bound_lambda_or_D ==
        doctest::Approx(std::exp(lambda_of_A(1.0) * std::sqrt(double(ls.log1 * ls.log3 / ls.log2)))));
  MESSAGE("lower=" << r.lower_side << " brute_max=" << r.sum_report.brute_max << " at l=" << r.sum_report.max_location);
}

TEST_CASE("near-half run on a single-term resonator") {
  ExperimentConfig c = config(1000, 0, 0.5);
  ResonatorFile f;
  f.mode = SigmaMode::NearHalf;
  f.half.support = {FactoredInteger::from_primes({})};
  f.half.weights = {1.0L};
  const ExperimentReport r = run_on_resonator(c, f);
  CHECK(r.verified);
  CHECK(r.resonator_size == 1);
  // ratio is a Phi-weighted average of the Dirichlet polynomial
  const SumReport plain = resonance_sums(ResonatorTerms::unit(), c.params, r.sigma);
  CHECK(r.sum_report.ratio == plain.ratio);
  c.params.sigma_mode = SigmaMode::NearOne;
  CHECK_THROWS_AS(run_on_resonator(c, f), DomainError);
}

TEST_CASE("sigma outside the strip needs the relaxed flag") {
  ExperimentConfig c = config(1000, 0, 1.0);
  CHECK_THROWS_AS(experiment_sigma(c), DomainError);
  c.relaxed_sigma = true;
  CHECK(experiment_sigma(c) == doctest::Approx(0.5 + 1 / std::log(std::log(1000.0))));
  c.params.a_param = -1;
  CHECK_THROWS_AS(experiment_sigma(c), DomainError);
}

TEST_CASE("reports are byte-identical across runs") {
  ThreadGuard g("1");
  const ExperimentConfig c = config(1000, 1, 0.5);
  const std::string a = emit_report(run_near_half_experiment(c), ReportFormat::Json);
  const std::string b = emit_report(run_near_half_experiment(c), ReportFormat::Json);
  CHECK(a == b);
  CHECK(emit_report(run_near_half_experiment(c), ReportFormat::Csv) ==
        emit_report(run_near_half_experiment(c), ReportFormat::Csv));
}

TEST_CASE("near-one runs") {
  const ExperimentReport r = run_near_one_experiment(config(10000, 1, 1.0, SigmaMode::NearOne));
  CHECK(r.verified);
  CHECK(r.sum_report.kernel == "bump");
  CHECK(r.resonator_size == 72);
  CHECK(r.key_ratio == doctest::Approx(key_ratio(build_resonator_near_one(10000), r.sigma, 1)));
  const LogScales ls = log_scales(10000);
  CHECK(r.bound_lambda_or_D == doctest::Approx(d_j_of_A(1, 1.0).value * std::pow(double(ls.log2), 2)));

  // A = 0 is sigma = 1, where D_j(0) = Y_j
  ExperimentConfig c = config(10000, 0, 0.0, SigmaMode::NearOne);
  CHECK_THROWS_AS(run_near_one_experiment(c), DomainError);
  c.relaxed_sigma = true;
  const ExperimentReport z = run_near_one_experiment(c);
  CHECK(z.sigma == 1.0);
  CHECK(z.verified);
  CHECK(z.bound_lambda_or_D == doctest::Approx(y_j(0) * std::log(std::log(10000.0))).epsilon(1e-9));
  const double dust = std::abs(z.lower_side / z.key_ratio - 1);
  MESSAGE("j=0 A=0 |G2|/G1 over key_ratio - 1 = " << dust);
  CHECK(dust < 0.01);
}

TEST_CASE("JSON round-trip and CSV layout") {
  ExperimentReport r;
  r.params.n_range = 1234;
  r.params.alpha = std::sqrt(2.0);
  r.params.j = 2;
  r.params.a_param = 0.5;
  r.sigma = 0.1 + 0.2;
  r.resonator_digest = fnv1a_hex("x");
  r.resonator_size = 7;
  r.sum_report.s1 = 1.0 / 3;
  r.sum_report.s2 = {2.0 / 7, -1e-300};
  r.sum_report.e1 = {1e-17, 3};
  r.sum_report.kernel = "gaussian";
  r.sum_report.brute_max = 12.5;
  r.sum_report.max_location = 999;
  r.bound_lambda_or_D = 1.5e10;
  r.lower_side = -0.25;
  r.verified = true;
  r.wall_time = 0.125;
  CHECK(parse_report_json(emit_report(r, ReportFormat::Json)) == r);
  CHECK_THROWS_AS(parse_report_json("{\"schema_version\": 1}"), FormatError);
  CHECK_THROWS_AS(parse_report_json("not json"), FormatError);

  const std::string csv = emit_report(r, ReportFormat::Csv);
  CHECK(csv.substr(0, csv.find('\n')) == "N,alpha,j,A,mode,s1,s2_abs,ratio,bound,brute_max,argmax,verified,wall_time");
  ExperimentReport r2 = r;
  r2.params.sigma_mode = SigmaMode::NearOne;
  const std::string two = emit_reports({r, r2}, ReportFormat::Csv);
  std::istringstream in(two);
  int lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
  }
  CHECK(lines == 3);
  CHECK(two.find("near-one") != std::string::npos);
}

TEST_CASE("config parser") {
  const ExperimentConfig c = parse_config(
      "# desk run\n"
      "n=10000\nalpha=1.0\nj=1\na_param=1.0\nmode=near-half\n"
      "gamma=0.45\nb=1.8\nkappa=0.45\nseed=7  # trailing comment\n\n");
  CHECK(c.params.n_range == 10000);
  CHECK(c.params.j == 1);
  CHECK(c.params.sigma_mode == SigmaMode::NearHalf);
  CHECK(c.resonator.kappa == 0.45);
  CHECK(c.resonator.seed == 7);
  const ExperimentConfig d = parse_config("mode = near-one\nsmooth=loglog/log3\nrelaxed_sigma=true\n");
  CHECK(d.params.sigma_mode == SigmaMode::NearOne);
  CHECK(d.smoothness == SmoothnessRule::LogLogOverLog3);
  CHECK(d.relaxed_sigma);
  CHECK_THROWS_AS(parse_config("colour=blue\n"), FormatError);
  CHECK_THROWS_AS(parse_config("n=ten\n"), FormatError);
  CHECK_THROWS_AS(parse_config("n\n"), FormatError);
  CHECK_THROWS_AS(parse_config("mode=sideways\n"), FormatError);
}

TEST_CASE("plot export and digest") {
  const PlotCurve curve{"ratio", {{1000, 1.5}, {10000, 0.25}}};
  CHECK(plot_csv(curve) == "x,y\n1000,1.5\n10000,0.25\n");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("resonator files") {
  const ExperimentConfig c = config(10000, 0, 0.5);
  const ResonatorFile f = build_resonator_file(c);
  const std::string text = write_resonator(f);
  CHECK(text.rfind("zres1 near-half 10000 0.45 1.8 0.45 10000 7\n", 0) == 0);
  const ResonatorFile g = read_resonator(text);
  CHECK(g.mode == SigmaMode::NearHalf);
  CHECK(write_resonator(g) == text);
  REQUIRE(g.half.support.size() == f.half.support.size());
  for (std::size_t i = 0; i < g.half.support.size(); ++i) {
    CHECK(g.half.support[i].prime_factors == f.half.support[i].prime_factors);
    CHECK(g.half.weights[i] == f.half.weights[i]);
  }
  CHECK(text.find("\n0 ") != std::string::npos);  // r(1) row, empty product

  const ResonatorFile one = build_resonator_file(config(10000, 0, 0.5, SigmaMode::NearOne));
  const std::string one_text = write_resonator(one);
  CHECK(one_text.rfind("zres1 near-one 10000 20.44996562367", 0) == 0);
  const ResonatorFile back = read_resonator(one_text);
  CHECK(back.one.members == one.one.members);
  CHECK(back.one.m_max == 100);
  CHECK(write_resonator(back) == one_text);

  CHECK_THROWS_AS(read_resonator(""), FormatError);
  CHECK_THROWS_AS(read_resonator("zres2 near-one 100 2\n1\n"), FormatError);
  CHECK_THROWS_AS(read_resonator("zres1 near-one 100\n1\n"), FormatError);
  CHECK_THROWS_AS(read_resonator("zres1 near-half 100 0.45 1.8 0.45 100 7\n0.5 1 2\n"), FormatError);
  CHECK_THROWS_AS(read_resonator("zres1 near-one 10000 20\n0\n"), FormatError);
}
