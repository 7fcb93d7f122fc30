#pragma once

// End-to-end experiments: brute-force maxima over the progression, the
// resonance inequality, reports, config files and resonator files.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zres/core_params.hpp"
#include "zres/resonance_sums.hpp"
#include "zres/resonator_near_half.hpp"
#include "zres/resonator_near_one.hpp"

namespace zres {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kLeadingOrderBanner =
    "targets are leading-order only: o(1) terms dropped";
inline constexpr double kInequalitySlack = 1e-6;

struct BruteMax {
  double value = 0;
  std::int64_t argmax = 0;
};

/// max of |zeta^(j)(sigma + i alpha l)| over l in [lo, hi] by the reference
/// evaluator, smallest l on ties. Throws BudgetExceeded when hi - lo + 1
/// exceeds `budget`.
BruteMax brute_max_range(int j, double sigma, double alpha, std::int64_t lo, std::int64_t hi,
                         int precision_bits = 53, std::int64_t budget = 10'000'000);
/// Scan over [ceil(sqrt N), N].
BruteMax brute_max(const ProgressionParams& params, double sigma, int precision_bits = 53);

std::int64_t ceil_sqrt(std::int64_t n);

struct ExperimentConfig {
  ProgressionParams params;
  ResonatorConfig resonator;
  /// Resonator length T; 0 means T = N.
  std::int64_t t_len = 0;
  SmoothnessRule smoothness = SmoothnessRule::LogLog;
  /// Accept A >= 0 and sigma outside (1/2, 1); alpha, j and N are still checked.
  bool relaxed_sigma = false;
  bool record_timing = true;
};

/// sigma_of(params), or the raw formula when relaxed.
double experiment_sigma(const ExperimentConfig& config);

struct ExperimentReport {
  int schema_version = kSchemaVersion;
  ProgressionParams params;
  double sigma = 0;
  bool relaxed_sigma = false;
  std::string resonator_digest;
  std::int64_t resonator_size = 0;
  SumReport sum_report;
  /// exp(lambda(A) ...) near 1/2, D_j(A) (log_2 N)^{j+1} near 1.
  double bound_lambda_or_D = 0;
  /// Near-one only.
  double key_ratio = 0;
  /// (|S2| - |E1| - |E2|) / S1 near 1/2, |G2| / G1 near 1.
  double lower_side = 0;
  double slack = 0;
  bool verified = false;
  /// True when the margin fell below 10x slack and brute_max was rescanned
  /// at doubled precision.
  bool precision_rescan = false;
  std::int64_t scan_lo = 0;
  std::int64_t scan_hi = 0;
  double wall_time = 0;
  std::string banner = kLeadingOrderBanner;

  bool operator==(const ExperimentReport&) const = default;
};

struct ResonatorFile;

ExperimentReport run_near_half_experiment(const ExperimentConfig& config);
ExperimentReport run_near_one_experiment(const ExperimentConfig& config);
/// Dispatches on config.params.sigma_mode.
ExperimentReport run_experiment(const ExperimentConfig& config);
/// The resonator the run for `config` would build.
ResonatorFile build_resonator_file(const ExperimentConfig& config);
/// Experiment on a given resonator; its mode must match the run mode.
ExperimentReport run_on_resonator(const ExperimentConfig& config, const ResonatorFile& file);

enum class ReportFormat { Json, Csv };

inline constexpr const char* kCsvHeader =
    "N,alpha,j,A,mode,s1,s2_abs,ratio,bound,brute_max,argmax,verified,wall_time";

/// JSON object or CSV header plus one row.
std::string emit_report(const ExperimentReport& report, ReportFormat format);
/// One header followed by a row per report.
std::string emit_reports(const std::vector<ExperimentReport>& reports, ReportFormat format);
std::string csv_row(const ExperimentReport& report);
/// Inverse of emit_report(.., Json). Throws FormatError.
ExperimentReport parse_report_json(const std::string& text);

/// Flat key=value lines, '#' comments. Keys: n, alpha, j, a_param, mode,
/// gamma, b, delta, kappa, seed, t_len, max_support, smooth, relaxed_sigma.
/// Throws FormatError on unknown keys or bad values.
ExperimentConfig parse_config(const std::string& text);

struct PlotCurve {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// "x,y" header plus one line per point.
std::string plot_csv(const PlotCurve& curve);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

struct NearHalfFileHeader {
  std::int64_t n = 0;
  double gamma = 0, b = 0, kappa = 0;
  std::int64_t t_len = 0;
  std::uint64_t seed = 0;
};

/// Header `zres1 near-half N gamma b kappa T seed`, then `log_m r_m p1,p2,...`
/// per representative (the empty product is written as 1).
std::string write_resonator(const ResonatorNearHalf& r, const NearHalfFileHeader& header);
/// Header `zres1 near-one N x`, then one member per line.
std::string write_resonator(const ResonatorNearOne& r);

struct ResonatorFile {
  SigmaMode mode = SigmaMode::NearHalf;
  NearHalfFileHeader near_half;
  ResonatorNearHalf half;
  ResonatorNearOne one;
  ResonatorTerms terms() const;
};

std::string write_resonator(const ResonatorFile& file);

/// Parses either format. Logs are recomputed from the factors and must agree
/// with the written values. Throws FormatError.
ResonatorFile read_resonator(const std::string& text);

}  // namespace zres
