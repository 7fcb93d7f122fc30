#include "zres/search_harness.hpp"

#include <charconv>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "zres/dickman_bounds.hpp"
#include "zres/errors.hpp"
#include "zres/parallel.hpp"
#include "zres/zeta_eval.hpp"

namespace zres {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::int64_t kScanChunk = 256;

std::string format_ld(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

// shortest round-trip form
std::string format_d(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void validate_relaxed(const ProgressionParams& p) {
  if (!(p.alpha > 0)) throw DomainError("alpha must be positive");
  if (p.j < 0) throw DomainError("j must be non-negative");
  if (!(p.a_param >= 0)) throw DomainError("A must be non-negative");
  if (p.n_range < kMinNForLog3) throw DomainError("N must be >= 16");
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// brute_max with one rescan at doubled precision when the margin is thin
void finish_inequality(ExperimentReport& rep, double slack) {
  const ProgressionParams& p = rep.params;
  rep.scan_lo = ceil_sqrt(p.n_range);
  rep.scan_hi = p.n_range;
  BruteMax bm = brute_max(p, rep.sigma);
  rep.slack = slack;
  if (bm.value - (rep.lower_side - slack) < 10 * slack) {
    bm = brute_max(p, rep.sigma, 106);
    rep.precision_rescan = true;
  }
  rep.sum_report.brute_max = bm.value;
  rep.sum_report.max_location = bm.argmax;
  rep.verified = bm.value >= rep.lower_side - slack;
}

Json sum_report_json(const SumReport& s) {
  Json j;
  j["s1"] = s.s1;
  j["s2_re"] = s.s2.real();
  j["s2_im"] = s.s2.imag();
  j["e1_re"] = s.e1.real();
  j["e1_im"] = s.e1.imag();
  j["e2_re"] = s.e2.real();
  j["e2_im"] = s.e2.imag();
  j["window_re"] = s.window.real();
  j["window_im"] = s.window.imag();
  j["ratio"] = s.ratio;
  j["theoretical_bound"] = s.theoretical_bound;
  j["brute_max"] = s.brute_max;
  j["max_location"] = s.max_location;
  j["kernel"] = s.kernel;
  j["truncation_radius"] = s.truncation_radius;
  j["weight_square_sum"] = s.weight_square_sum;
  j["diagonal_main_term"] = s.diagonal_main_term;
  return j;
}

SumReport sum_report_from(const Json& j) {
  SumReport s;
  s.s1 = j.at("s1").get<double>();
  s.s2 = {j.at("s2_re").get<double>(), j.at("s2_im").get<double>()};
  s.e1 = {j.at("e1_re").get<double>(), j.at("e1_im").get<double>()};
  s.e2 = {j.at("e2_re").get<double>(), j.at("e2_im").get<double>()};
  s.window = {j.at("window_re").get<double>(), j.at("window_im").get<double>()};
  s.ratio = j.at("ratio").get<double>();
  s.theoretical_bound = j.at("theoretical_bound").get<double>();
  s.brute_max = j.at("brute_max").get<double>();
  s.max_location = j.at("max_location").get<std::int64_t>();
  s.kernel = j.at("kernel").get<std::string>();
  s.truncation_radius = j.at("truncation_radius").get<std::int64_t>();
  s.weight_square_sum = j.at("weight_square_sum").get<double>();
  s.diagonal_main_term = j.at("diagonal_main_term").get<double>();
  return s;
}

Json report_json(const ExperimentReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["banner"] = r.banner;
  Json p;
  p["n"] = r.params.n_range;
  p["alpha"] = r.params.alpha;
  p["j"] = r.params.j;
  p["a_param"] = r.params.a_param;
  p["mode"] = to_string(r.params.sigma_mode);
  j["params"] = p;
  j["sigma"] = r.sigma;
  j["relaxed_sigma"] = r.relaxed_sigma;
  j["resonator_digest"] = r.resonator_digest;
  j["resonator_size"] = r.resonator_size;
  j["sum_report"] = sum_report_json(r.sum_report);
  j["bound_lambda_or_D"] = r.bound_lambda_or_D;
  j["key_ratio"] = r.key_ratio;
  j["lower_side"] = r.lower_side;
  j["slack"] = r.slack;
  j["verified"] = r.verified;
  j["precision_rescan"] = r.precision_rescan;
  j["scan_lo"] = r.scan_lo;
  j["scan_hi"] = r.scan_hi;
  j["wall_time"] = r.wall_time;
  return j;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw FormatError("config: bad boolean for " + key + ": " + v);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw FormatError("bad value for " + key + ": " + v);
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

std::int64_t ceil_sqrt(std::int64_t n) {
  if (n <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

BruteMax brute_max_range(int j, double sigma, double alpha, std::int64_t lo, std::int64_t hi,
                         int precision_bits, std::int64_t budget) {
  if (hi < lo) throw DomainError("brute_max: empty range");
  if (hi - lo + 1 > budget) throw BudgetExceeded("brute_max: range exceeds the scan budget");
  const long chunks = static_cast<long>((hi - lo) / kScanChunk + 1);
  std::vector<BruteMax> slots(chunks);
  parallel_chunks(chunks, [&](long c) {
    const std::int64_t a = lo + c * kScanChunk;
    const std::int64_t b = std::min(hi, a + kScanChunk - 1);
    BruteMax best{-1, a};
    for (std::int64_t l = a; l <= b; ++l) {
      const double v = std::abs(zeta_derivative_ref(j, sigma, alpha * static_cast<double>(l), precision_bits));
      if (v > best.value) best = {v, l};
    }
    slots[c] = best;
  });
  BruteMax best = slots.front();
  for (const BruteMax& s : slots) {
    if (s.value > best.value) best = s;
  }
  return best;
}

BruteMax brute_max(const ProgressionParams& params, double sigma, int precision_bits) {
  if (params.n_range > 10'000'000) throw BudgetExceeded("brute_max: N beyond desk scale (10^7)");
  return brute_max_range(params.j, sigma, params.alpha, ceil_sqrt(params.n_range), params.n_range,
                         precision_bits);
}

double experiment_sigma(const ExperimentConfig& config) {
  const ProgressionParams& p = config.params;
  if (!config.relaxed_sigma) {
    p.validate();
    return sigma_of(p);
  }
  validate_relaxed(p);
  const double shift = p.a_param / static_cast<double>(log_scales(p.n_range).log2);
  return p.sigma_mode == SigmaMode::NearHalf ? 0.5 + shift : 1.0 - shift;
}

ExperimentReport run_on_resonator(const ExperimentConfig& config, const ResonatorFile& file) {
  const auto start = std::chrono::steady_clock::now();
  if (file.mode != config.params.sigma_mode) throw DomainError("resonator file mode does not match the run mode");
  ExperimentReport rep;
  rep.params = config.params;
  rep.relaxed_sigma = config.relaxed_sigma;
  rep.sigma = experiment_sigma(config);
  rep.resonator_digest = fnv1a_hex(write_resonator(file));
  const ResonatorTerms terms = file.terms();
  rep.resonator_size = static_cast<std::int64_t>(terms.size());
  if (file.mode == SigmaMode::NearHalf) {
    rep.sum_report = resonance_sums(terms, config.params, rep.sigma);
    const SumReport& s = rep.sum_report;
    rep.lower_side = (std::abs(s.s2) - std::abs(s.e1) - std::abs(s.e2)) / s.s1;
  } else {
    rep.sum_report = bump_sums(terms, config.params, rep.sigma);
    rep.key_ratio = key_ratio(file.one, rep.sigma, config.params.j);
    rep.lower_side = rep.sum_report.ratio;
  }
  rep.bound_lambda_or_D = rep.sum_report.theoretical_bound;
  finish_inequality(rep, kInequalitySlack * rep.sum_report.ratio);
  rep.wall_time = config.record_timing ? elapsed(start) : 0.0;
  return rep;
}

ResonatorFile build_resonator_file(const ExperimentConfig& config) {
  ResonatorFile f;
  f.mode = config.params.sigma_mode;
  const std::int64_t n = config.params.n_range;
  if (f.mode == SigmaMode::NearOne) {
    f.one = build_resonator_near_one(n, config.smoothness);
    return f;
  }
  config.resonator.validate();
  const std::int64_t t_len = config.t_len > 0 ? config.t_len : n;
  const PrimeBand band = build_prime_band(n, config.resonator.gamma);
  f.half = build_resonator_near_half(n, t_len, experiment_sigma(config), config.resonator, band);
  f.near_half = {n, config.resonator.gamma, config.resonator.b, config.resonator.kappa, t_len,
                 config.resonator.seed};
  return f;
}

ExperimentReport run_near_half_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.params.sigma_mode = SigmaMode::NearHalf;
  const auto start = std::chrono::steady_clock::now();
  const ResonatorFile file = build_resonator_file(cfg);
  ExperimentReport rep = run_on_resonator(cfg, file);
  if (cfg.record_timing) rep.wall_time = elapsed(start);
  return rep;
}

ExperimentReport run_near_one_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.params.sigma_mode = SigmaMode::NearOne;
  const auto start = std::chrono::steady_clock::now();
  const ResonatorFile file = build_resonator_file(cfg);
  ExperimentReport rep = run_on_resonator(cfg, file);
  if (cfg.record_timing) rep.wall_time = elapsed(start);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return config.params.sigma_mode == SigmaMode::NearHalf ? run_near_half_experiment(config)
                                                         : run_near_one_experiment(config);
}

std::string csv_row(const ExperimentReport& r) {
  std::ostringstream out;
  out << r.params.n_range << ',' << format_d(r.params.alpha) << ',' << r.params.j << ','
      << format_d(r.params.a_param) << ',' << to_string(r.params.sigma_mode) << ','
      << format_d(r.sum_report.s1) << ',' << format_d(std::abs(r.sum_report.s2)) << ','
      << format_d(r.sum_report.ratio) << ',' << format_d(r.bound_lambda_or_D) << ','
      << format_d(r.sum_report.brute_max) << ',' << r.sum_report.max_location << ','
      << (r.verified ? "true" : "false") << ',' << format_d(r.wall_time) << '\n';
  return out.str();
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return report_json(report).dump(2) + "\n";
  return std::string(kCsvHeader) + "\n" + csv_row(report);
}

std::string emit_reports(const std::vector<ExperimentReport>& reports, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    return arr.dump(2) + "\n";
  }
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) out += csv_row(r);
  return out;
}

ExperimentReport parse_report_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    ExperimentReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) throw FormatError("report: unsupported schema_version");
    r.banner = j.at("banner").get<std::string>();
    const Json& p = j.at("params");
    r.params.n_range = p.at("n").get<std::int64_t>();
    r.params.alpha = p.at("alpha").get<double>();
    r.params.j = p.at("j").get<int>();
    r.params.a_param = p.at("a_param").get<double>();
    r.params.sigma_mode = parse_sigma_mode(p.at("mode").get<std::string>());
    r.sigma = j.at("sigma").get<double>();
    r.relaxed_sigma = j.at("relaxed_sigma").get<bool>();
    r.resonator_digest = j.at("resonator_digest").get<std::string>();
    r.resonator_size = j.at("resonator_size").get<std::int64_t>();
    r.sum_report = sum_report_from(j.at("sum_report"));
    r.bound_lambda_or_D = j.at("bound_lambda_or_D").get<double>();
    r.key_ratio = j.at("key_ratio").get<double>();
    r.lower_side = j.at("lower_side").get<double>();
    r.slack = j.at("slack").get<double>();
    r.verified = j.at("verified").get<bool>();
    r.precision_rescan = j.at("precision_rescan").get<bool>();
    r.scan_lo = j.at("scan_lo").get<std::int64_t>();
    r.scan_hi = j.at("scan_hi").get<std::int64_t>();
    r.wall_time = j.at("wall_time").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": missing '='");
    const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (key == "n") c.params.n_range = parse_number<std::int64_t>(key, v);
    else if (key == "alpha") c.params.alpha = parse_number<double>(key, v);
    else if (key == "j") c.params.j = parse_number<int>(key, v);
    else if (key == "a_param") c.params.a_param = parse_number<double>(key, v);
    else if (key == "mode") {
      try {
        c.params.sigma_mode = parse_sigma_mode(v);
      } catch (const DomainError&) {
        throw FormatError("config: bad mode: " + v);
      }
    }
    else if (key == "gamma") c.resonator.gamma = parse_number<double>(key, v);
    else if (key == "b") c.resonator.b = parse_number<double>(key, v);
    else if (key == "delta") c.resonator.delta = parse_number<double>(key, v);
    else if (key == "kappa") c.resonator.kappa = parse_number<double>(key, v);
    else if (key == "seed") c.resonator.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "t_len") c.t_len = parse_number<std::int64_t>(key, v);
    else if (key == "max_support") c.resonator.max_support = parse_number<std::int64_t>(key, v);
    else if (key == "smooth") {
      try {
        c.smoothness = parse_smoothness_rule(v);
      } catch (const DomainError&) {
        throw FormatError("config: bad smooth rule: " + v);
      }
    }
    else if (key == "relaxed_sigma") c.relaxed_sigma = parse_bool(key, v);
    else throw FormatError("config: unknown key " + key);
  }
  return c;
}

std::string plot_csv(const PlotCurve& curve) {
  std::string out = "x,y\n";
  for (const auto& [x, y] : curve.points) out += format_d(x) + "," + format_d(y) + "\n";
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string write_resonator(const ResonatorNearHalf& r, const NearHalfFileHeader& h) {
  std::ostringstream out;
  out << "zres1 near-half " << h.n << ' ' << format_d(h.gamma) << ' ' << format_d(h.b) << ' '
      << format_d(h.kappa) << ' ' << h.t_len << ' ' << h.seed << '\n';
  for (std::size_t i = 0; i < r.support.size(); ++i) {
    out << format_ld(r.support[i].log_value) << ' ' << format_ld(r.weights[i]) << ' ';
    const auto& ps = r.support[i].prime_factors;
    if (ps.empty()) out << '1';
    for (std::size_t k = 0; k < ps.size(); ++k) out << (k ? "," : "") << ps[k];
    out << '\n';
  }
  return out.str();
}

std::string write_resonator(const ResonatorNearOne& r) {
  std::ostringstream out;
  out << "zres1 near-one " << r.n << ' ' << format_d(r.smoothness_bound) << '\n';
  for (std::int64_t m : r.members) out << m << '\n';
  return out.str();
}

std::string write_resonator(const ResonatorFile& f) {
  return f.mode == SigmaMode::NearHalf ? write_resonator(f.half, f.near_half) : write_resonator(f.one);
}

ResonatorTerms ResonatorFile::terms() const {
  return mode == SigmaMode::NearHalf ? ResonatorTerms::from(half) : ResonatorTerms::from(one);
}

ResonatorFile read_resonator(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("resonator: empty file");
  const auto head = split_ws(line);
  if (head.size() < 2 || head[0] != "zres1") throw FormatError("resonator: missing zres1 header");
  ResonatorFile f;
  try {
    if (head[1] == "near-half") {
      if (head.size() != 8) throw FormatError("resonator: near-half header needs 6 fields");
      f.mode = SigmaMode::NearHalf;
      NearHalfFileHeader& h = f.near_half;
      h.n = parse_number<std::int64_t>("N", head[2]);
      h.gamma = parse_number<double>("gamma", head[3]);
      h.b = parse_number<double>("b", head[4]);
      h.kappa = parse_number<double>("kappa", head[5]);
      h.t_len = parse_number<std::int64_t>("T", head[6]);
      h.seed = parse_number<std::uint64_t>("seed", head[7]);
      f.half.t_len = h.t_len;
      while (std::getline(in, line)) {
        const auto cols = split_ws(line);
        if (cols.empty()) continue;
        if (cols.size() != 3) throw FormatError("resonator: expected 'log_m r_m primes'");
        const long double log_m = parse_number<long double>("log_m", cols[0]);
        const long double w = parse_number<long double>("r_m", cols[1]);
        std::vector<std::int64_t> primes;
        if (cols[2] != "1") {
          std::istringstream ps(cols[2]);
          for (std::string tok; std::getline(ps, tok, ',');) primes.push_back(parse_number<std::int64_t>("prime", tok));
        }
        FactoredInteger m = FactoredInteger::from_primes(primes);
        if (std::abs(m.log_value - log_m) > 1e-15L * std::max(1.0L, std::abs(log_m))) {
          throw FormatError("resonator: log_m disagrees with its factors");
        }
        if (!(w >= 0)) throw FormatError("resonator: negative weight");
        f.half.support.push_back(std::move(m));
        f.half.weights.push_back(w);
      }
      f.half.members = static_cast<std::int64_t>(f.half.support.size());
    } else if (head[1] == "near-one") {
      if (head.size() != 4) throw FormatError("resonator: near-one header needs 2 fields");
      f.mode = SigmaMode::NearOne;
      const std::int64_t n = parse_number<std::int64_t>("N", head[2]);
      const double x = parse_number<double>("x", head[3]);
      std::vector<std::int64_t> members;
      while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const std::int64_t m = parse_number<std::int64_t>("member", line);
        if (m < 1) throw FormatError("resonator: members must be positive");
        members.push_back(m);
      }
      f.one = ResonatorNearOne::from_members(std::move(members));
      f.one.n = n;
      f.one.m_max = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(n))));
      f.one.smoothness_bound = x;
    } else {
      throw FormatError("resonator: unknown mode " + head[1]);
    }
  } catch (const DomainError& e) {
    throw FormatError(std::string("resonator: ") + e.what());
  }
  return f;
}

}  // namespace zres
