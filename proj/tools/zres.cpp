// zres: command line front end for the evaluators, resonators, sums and the
// search harness.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "zres/core_params.hpp"
#include "zres/dickman_bounds.hpp"
#include "zres/errors.hpp"
#include "zres/resonance_sums.hpp"
#include "zres/resonator_near_half.hpp"
#include "zres/resonator_near_one.hpp"
#include "zres/search_harness.hpp"
#include "zres/zeta_eval.hpp"

using namespace zres;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

std::string g15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// T0 or T0:T1:points
std::vector<double> parse_t_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() == 3) {
      const double t0 = std::stod(parts[0]), t1 = std::stod(parts[1]);
      const int steps = std::stoi(parts[2]);
      if (steps < 1) throw FormatError("--t: steps must be >= 1");
      if (steps == 1) return {t0};
      std::vector<double> ts;
      for (int i = 0; i < steps; ++i) ts.push_back(t0 + (t1 - t0) * i / (steps - 1));
      return ts;
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw FormatError("--t expects T0 or T0:T1:steps, got '" + text + "'");
}

double parse_smooth_x(const std::string& text, std::int64_t n) {
  if (text == "loglog" || text == "loglog/log3") return smoothness_bound(n, parse_smoothness_rule(text));
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size() && x >= 2) return x;
  } catch (const std::exception&) {
  }
  throw FormatError("--smooth-x expects loglog, loglog/log3 or a number >= 2");
}

ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw FormatError("format must be json or csv");
}

std::vector<ExperimentReport> read_reports(const std::string& path) {
  const std::string text = read_file(path);
  const auto parsed = nlohmann::ordered_json::parse(text, nullptr, false);
  if (parsed.is_discarded()) throw FormatError(path + ": not JSON");
  std::vector<ExperimentReport> out;
  if (parsed.is_array()) {
    for (const auto& item : parsed) out.push_back(parse_report_json(item.dump()));
  } else {
    out.push_back(parse_report_json(text));
  }
  return out;
}

// one curve per quantity, x = N
void export_plots(const std::vector<ExperimentReport>& reports, const std::string& dir) {
  std::filesystem::create_directories(dir);
  PlotCurve ratio{"ratio", {}}, lower{"lower_side", {}}, brute{"brute_max", {}}, bound{"bound", {}};
  for (const auto& r : reports) {
    const double x = static_cast<double>(r.params.n_range);
    ratio.points.emplace_back(x, r.sum_report.ratio);
    lower.points.emplace_back(x, r.lower_side);
    brute.points.emplace_back(x, r.sum_report.brute_max);
    bound.points.emplace_back(x, r.bound_lambda_or_D);
  }
  for (const PlotCurve* c : {&ratio, &lower, &brute, &bound}) {
    write_output((std::filesystem::path(dir) / (c->name + ".csv")).string(), plot_csv(*c));
  }
}

std::vector<std::int64_t> parse_n_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      out.push_back(std::stoll(p));
    } catch (const std::exception&) {
      throw FormatError("--n-list expects comma-separated integers");
    }
  }
  return out;
}

int print_verdict(const std::string& name, bool ok, const std::string& detail) {
  std::cout << name << ' ' << (ok ? "PASS" : "FAIL") << ' ' << detail << '\n';
  return ok ? 0 : 1;
}

int verify_lemma1(int cases, std::uint64_t seed) {
  const Lemma1Suite s = lemma1_random_suite(cases, seed);
  return print_verdict("lemma1", s.passed == s.cases,
                       "cases=" + std::to_string(s.cases) + " passed=" + std::to_string(s.passed) +
                           " worst_ratio=" + g15(s.worst_ratio) + " constant=" + g15(kLemma1Constant));
}

int verify_lemma2(int paths, std::uint64_t seed) {
  int passed = 0;
  for (const GallagherResult& r : gallagher_suite({paths, seed})) passed += r.pass;
  const SampledFunction one = sample_function([](double) { return std::complex<double>(1, 0); },
                                              [](double) { return std::complex<double>(0, 0); }, 0, 10, 8);
  const double pi = std::numbers::pi;
  const SampledFunction sine = sample_function(
      [pi](double t) { return std::complex<double>(std::sin(2 * pi * t), 0); },
      [pi](double t) { return std::complex<double>(2 * pi * std::cos(2 * pi * t), 0); }, 0, 10, 16);
  const int analytic = gallagher_check(one).pass + gallagher_check(sine).pass;
  return print_verdict("lemma2", passed == paths && analytic == 2,
                       "paths=" + std::to_string(paths) + " passed=" + std::to_string(passed) +
                           " analytic=" + std::to_string(analytic) + "/2 constant=" + g15(kGallagherConstant));
}

int verify_lemma3(std::int64_t n) {
  bool ok = true;
  for (int j : {0, 1}) {
    for (double sigma : {0.6, 0.75, 0.9}) {
      for (double alpha : {1.0, std::sqrt(2.0)}) {
        const double a = discrete_mean_square(j, sigma, alpha, n / 2);
        const double b = discrete_mean_square(j, sigma, alpha, n);
        const double f = b / a;
        ok = ok && f >= 0.5 && f <= 2.0;
        std::cout << "j=" << j << " sigma=" << sigma << " alpha=" << g15(alpha) << " mean(N/2)=" << g15(a)
                  << " mean(N)=" << g15(b) << " factor=" << g15(f) << '\n';
      }
    }
  }
  return print_verdict("lemma3", ok, "N=" + std::to_string(n) + " factor in [0.5, 2]");
}

int verify_poisson(std::int64_t n, double a, int pairs) {
  ExperimentConfig cfg;
  cfg.params.n_range = n;
  cfg.params.a_param = a;
  const ResonatorFile f = build_resonator_file(cfg);
  const PoissonResult r = poisson_check(f.terms(), cfg.params, pairs);
  return print_verdict("poisson", r.max_discrepancy < 1e-8,
                       "N=" + std::to_string(n) + " pairs=" + std::to_string(r.pairs) +
                           " max_discrepancy=" + g15(r.max_discrepancy));
}

int verify_dickman() {
  const double rho2 = dickman_rho(2.0);
  const double d00 = d_j_of_A(0, 0.0).value;
  const double e_gamma = std::exp(std::numbers::egamma);
  const double l0 = lambda_of_A(0.0);
  const double l0_ref = 1.0 / (std::numbers::sqrt2 * (std::numbers::e - 1));
  const bool ok = std::fabs(rho2 - (1 - std::numbers::ln2)) < 1e-10 && std::fabs(d00 - e_gamma) < 1e-6 &&
                  std::fabs(l0 - l0_ref) < 1e-12;
  return print_verdict("dickman", ok,
                       "rho(2)=" + g17(rho2) + " D_0(0)=" + g17(d00) + " lambda(0)=" + g17(l0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large values of zeta derivatives on homogeneous progressions"};
  app.require_subcommand(1);

  // zeta-eval
  auto* ze = app.add_subcommand("zeta-eval", "zeta^(j)(sigma + it) as CSV t,re,im,abs,error_bound");
  int ze_j = 0;
  double ze_sigma = 0.75;
  std::string ze_t, ze_mode = "both";
  std::int64_t ze_trunc = 0;
  double ze_eps = 0.1;
  int ze_bits = 53;
  bool ze_force = false;
  ze->add_option("--j", ze_j, "derivative order")->required();
  ze->add_option("--sigma", ze_sigma)->required();
  ze->add_option("--t", ze_t, "T0 or T0:T1:steps")->required();
  ze->add_option("--mode", ze_mode)->check(CLI::IsMember({"approx", "ref", "both"}));
  ze->add_option("--truncation", ze_trunc, "Dirichlet length T (default floor of the first t)");
  ze->add_option("--epsilon", ze_eps);
  ze->add_option("--bits", ze_bits, "reference precision");
  ze->add_flag("--force", ze_force, "allow t outside [T, 2T] (non-rigorous)");

  // resonate build
  auto* res = app.add_subcommand("resonate", "resonator construction");
  auto* build = res->add_subcommand("build", "write a resonator file");
  res->require_subcommand(1);
  std::string rb_mode = "near-half", rb_out, rb_smooth = "loglog";
  ExperimentConfig rb;
  build->add_option("--mode", rb_mode)->check(CLI::IsMember({"near-half", "near-one"}));
  build->add_option("--n", rb.params.n_range)->required();
  build->add_option("--gamma", rb.resonator.gamma);
  build->add_option("--b", rb.resonator.b);
  build->add_option("--delta", rb.resonator.delta);
  build->add_option("--kappa", rb.resonator.kappa);
  build->add_option("--t-len", rb.t_len, "resonator length T (default N)");
  build->add_option("--seed", rb.resonator.seed);
  build->add_option("--max-support", rb.resonator.max_support);
  build->add_option("--a-param", rb.params.a_param, "fixes sigma for the weights");
  build->add_flag("--relaxed-sigma", rb.relaxed_sigma);
  build->add_option("--smooth-x", rb_smooth, "loglog, loglog/log3 or a number");
  build->add_option("-o,--out", rb_out);

  // sums
  auto* sums = app.add_subcommand("sums", "resonance sums on a resonator file, as JSON");
  std::string sm_mode = "near-half", sm_file;
  ExperimentConfig sm;
  sums->add_option("--mode", sm_mode)->check(CLI::IsMember({"near-half", "near-one"}));
  sums->add_option("--resonator", sm_file)->required();
  sums->add_option("--n", sm.params.n_range)->required();
  sums->add_option("--alpha", sm.params.alpha);
  sums->add_option("--j", sm.params.j);
  sums->add_option("--a-param", sm.params.a_param);
  sums->add_flag("--relaxed-sigma", sm.relaxed_sigma);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "lambda(A), D_j(A) and the report grid");
  std::vector<double> bd_lambda;
  std::vector<double> bd_dja;
  bool bd_table = false;
  auto* o_lambda = bounds->add_option("--lambda", bd_lambda, "A")->expected(1);
  auto* o_dja = bounds->add_option("--dja", bd_dja, "J A")->expected(2);
  auto* o_table = bounds->add_flag("--table", bd_table, "CSV j,A,D_j(A)");
  o_lambda->excludes(o_dja)->excludes(o_table);
  o_dja->excludes(o_table);

  // search
  auto* search = app.add_subcommand("search", "run experiments from a config file");
  std::string se_config, se_format = "json", se_out, se_plot, se_nlist;
  search->add_option("--config", se_config)->required();
  search->add_option("--format", se_format)->check(CLI::IsMember({"json", "csv"}));
  search->add_option("--n-list", se_nlist, "comma-separated N values overriding n");
  search->add_option("-o,--out", se_out);
  search->add_option("--plot-dir", se_plot, "write one x,y CSV per curve");
  bool se_no_timing = false;
  search->add_flag("--no-timing", se_no_timing, "wall_time = 0 for byte-identical output");

  // verify
  auto* verify = app.add_subcommand("verify", "numerical checks");
  verify->require_subcommand(1);
  int v_cases = 200, v_paths = 50, v_pairs = 100;
  std::uint64_t v_seed = 1, v_path_seed = 99;
  std::int64_t v_n3 = 1000, v_np = 10000;
  double v_a = 1.0;
  auto* v1 = verify->add_subcommand("lemma1", "truncated Dirichlet polynomial error");
  v1->add_option("--cases", v_cases);
  v1->add_option("--seed", v_seed);
  auto* v2 = verify->add_subcommand("lemma2", "Gallagher inequality");
  v2->add_option("--paths", v_paths);
  v2->add_option("--seed", v_path_seed);
  auto* v3 = verify->add_subcommand("lemma3", "discrete mean square between N/2 and N");
  v3->add_option("--n", v_n3);
  auto* vp = verify->add_subcommand("poisson", "Poisson summation on resonator pairs");
  vp->add_option("--n", v_np);
  vp->add_option("--a-param", v_a);
  vp->add_option("--pairs", v_pairs);
  auto* vd = verify->add_subcommand("dickman", "rho(2), D_0(0) and lambda(0)");

  // report
  auto* report = app.add_subcommand("report", "re-emit JSON reports");
  std::vector<std::string> rp_inputs;
  std::string rp_format = "csv", rp_out, rp_plot;
  bool rp_check = false;
  report->add_option("inputs", rp_inputs, "JSON report files")->required();
  report->add_option("--format", rp_format)->check(CLI::IsMember({"json", "csv"}));
  report->add_option("-o,--out", rp_out);
  report->add_option("--plot-dir", rp_plot);
  report->add_flag("--check", rp_check, "exit 1 unless every report is verified");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ze) {
      const std::vector<double> ts = parse_t_grid(ze_t);
      EvalConfig cfg;
      cfg.truncation = ze_trunc > 0 ? ze_trunc : std::max<std::int64_t>(1, static_cast<std::int64_t>(ts.front()));
      cfg.epsilon = ze_eps;
      cfg.precision_bits = ze_bits;
      cfg.error_constant = kLemma1Constant;
      std::cout << "t,re,im,abs,error_bound\n";
      for (double t : ts) {
        if (ze_mode != "ref") {
          const ZetaSample s = zeta_derivative_approx(ze_j, ze_sigma, t, cfg, ze_force);
          std::cout << g17(t) << ',' << g17(s.value.real()) << ',' << g17(s.value.imag()) << ','
                    << g17(std::abs(s.value)) << ',' << g17(s.error_bound) << '\n';
        }
        if (ze_mode != "approx") {
          const ReferenceValue r = zeta_derivative_ref_detailed(ze_j, ze_sigma, t, ze_bits);
          std::cout << g17(t) << ',' << g17(r.value.real()) << ',' << g17(r.value.imag()) << ','
                    << g17(std::abs(r.value)) << ',' << g17(r.remainder_bound) << '\n';
        }
      }
      return 0;
    }

    if (*build) {
      rb.params.sigma_mode = parse_sigma_mode(rb_mode);
      ResonatorFile f;
      if (rb.params.sigma_mode == SigmaMode::NearOne) {
        f.mode = SigmaMode::NearOne;
        f.one = build_resonator_near_one(rb.params.n_range, parse_smooth_x(rb_smooth, rb.params.n_range));
      } else {
        f = build_resonator_file(rb);
      }
      write_output(rb_out, write_resonator(f));
      return 0;
    }

    if (*sums) {
      sm.params.sigma_mode = parse_sigma_mode(sm_mode);
      const ResonatorFile f = read_resonator(read_file(sm_file));
      if (f.mode != sm.params.sigma_mode) throw DomainError("resonator file mode does not match --mode");
      const double sigma = experiment_sigma(sm);
      const ResonatorTerms terms = f.terms();
      const SumReport s = f.mode == SigmaMode::NearHalf ? resonance_sums(terms, sm.params, sigma)
                                                        : bump_sums(terms, sm.params, sigma);
      nlohmann::ordered_json j;
      j["s1"] = s.s1;
      j["s2_re"] = s.s2.real();
      j["s2_im"] = s.s2.imag();
      j["e1_abs"] = std::abs(s.e1);
      j["e2_abs"] = std::abs(s.e2);
      j["ratio"] = s.ratio;
      j["theoretical_bound"] = s.theoretical_bound;
      j["kernel"] = s.kernel;
      j["truncation_radius"] = s.truncation_radius;
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*bounds) {
      if (!bd_lambda.empty()) {
        std::cout << g15(lambda_of_A(bd_lambda[0])) << '\n';
      } else if (!bd_dja.empty()) {
        const double jd = bd_dja[0];
        if (jd < 0 || jd != std::floor(jd)) throw DomainError("--dja: J must be a non-negative integer");
        std::cout << g15(d_j_of_A(static_cast<int>(jd), bd_dja[1]).value) << '\n';
      } else if (bd_table) {
        std::cout << "j,A,D_j(A)\n";
        for (int j : {0, 1, 2}) {
          for (double a : {0.0, 0.5, 1.0}) std::cout << j << ',' << a << ',' << g15(d_j_of_A(j, a).value) << '\n';
        }
      } else {
        throw FormatError("bounds: give --lambda A, --dja J A or --table");
      }
      return 0;
    }

    if (*search) {
      const ExperimentConfig base = parse_config(read_file(se_config));
      std::vector<std::int64_t> ns = se_nlist.empty() ? std::vector<std::int64_t>{base.params.n_range}
                                                      : parse_n_list(se_nlist);
      std::vector<ExperimentReport> reports;
      for (std::int64_t n : ns) {
        ExperimentConfig cfg = base;
        cfg.params.n_range = n;
        cfg.record_timing = !se_no_timing;
        reports.push_back(run_experiment(cfg));
      }
      const ReportFormat fmt = parse_format(se_format);
      write_output(se_out, reports.size() == 1 ? emit_report(reports[0], fmt) : emit_reports(reports, fmt));
      if (!se_plot.empty()) export_plots(reports, se_plot);
      for (const auto& r : reports) {
        if (!r.verified) return 1;
      }
      return 0;
    }

    if (*verify) {
      if (*v1) return verify_lemma1(v_cases, v_seed);
      if (*v2) return verify_lemma2(v_paths, v_path_seed);
      if (*v3) return verify_lemma3(v_n3);
      if (*vp) return verify_poisson(v_np, v_a, v_pairs);
      if (*vd) return verify_dickman();
    }

    if (*report) {
      std::vector<ExperimentReport> all;
      for (const auto& path : rp_inputs) {
        for (auto& r : read_reports(path)) all.push_back(std::move(r));
      }
      write_output(rp_out, emit_reports(all, parse_format(rp_format)));
      if (!rp_plot.empty()) export_plots(all, rp_plot);
      if (rp_check) {
        for (const auto& r : all) {
          if (!r.verified) return 1;
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "zres: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
