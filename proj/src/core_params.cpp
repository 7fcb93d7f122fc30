#include "zres/core_params.hpp"

namespace zres {

std::string to_string(SigmaMode mode) {
  return mode == SigmaMode::NearHalf ? "near-half" : "near-one";
}

SigmaMode parse_sigma_mode(const std::string& text) {
  if (text == "near-half") return SigmaMode::NearHalf;
  if (text == "near-one") return SigmaMode::NearOne;
  throw FormatError("unknown sigma mode '" + text + "'");
}

double iterated_log(double x, int k) {
  return static_cast<double>(iterated_log<long double>(x, k));
}

namespace {

long double sigma_raw(const ProgressionParams& p) {
  const long double l2 = iterated_log<long double>(static_cast<long double>(p.n_range), 2);
  const long double shift = static_cast<long double>(p.a_param) / l2;
  return p.sigma_mode == SigmaMode::NearHalf ? 0.5L + shift : 1.0L - shift;
}

}  // namespace

void ProgressionParams::validate() const {
  if (!(alpha > 0)) throw DomainError("alpha must be positive");
  if (j < 0) throw DomainError("derivative order j must be non-negative");
  if (!(a_param > 0)) throw DomainError("A must be positive");
  if (n_range < kMinNForLog3) throw DomainError("N must be at least 16");
  const long double s = sigma_raw(*this);
  if (!(s > 0.5L && s < 1.0L)) throw DomainError("A pushes sigma outside (1/2, 1)");
}

void EvalConfig::validate() const {
  if (truncation < 1) throw DomainError("truncation must be >= 1");
  if (!(epsilon > 0 && epsilon < 0.25)) throw DomainError("epsilon must lie in (0, 1/4)");
  if (precision_bits < 53) throw DomainError("precision_bits must be >= 53");
  if (!(kappa > 0 && kappa < 1)) throw DomainError("kappa must lie in (0, 1)");
  if (!(sigma0 > 0 && sigma0 < 1)) throw DomainError("sigma0 must lie in (0, 1)");
  if (!(error_constant > 0)) throw DomainError("error constant must be positive");
}

double sigma_of(const ProgressionParams& params) {
  params.validate();
  return static_cast<double>(sigma_raw(params));
}

LogScales log_scales(std::int64_t n) {
  if (n < kMinNForLog3) throw DomainError("log_3 N requires N >= 16");
  const long double x = static_cast<long double>(n);
  return {iterated_log<long double>(x, 1), iterated_log<long double>(x, 2),
          iterated_log<long double>(x, 3)};
}

}  // namespace zres
