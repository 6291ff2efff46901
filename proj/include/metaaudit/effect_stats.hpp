#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace metaaudit {

/// One base-study ratio estimate (OR/RR/HR) with its confidence interval.
struct EffectEstimate {
  std::string study_id;
  std::string label;
  double ee = 1.0;
  double cl_low = 1.0;
  double cl_high = 1.0;
  double confidence_level = 0.95;
  std::optional<std::string> group;
};

/// Throws DomainError unless 0 < cl_low <= ee <= cl_high and the
/// confidence level lies strictly inside (0, 1).
void validate_estimate(const EffectEstimate& est);

enum class PValueMethod {
  LinearExact,     // symmetric CI on the natural scale, exact normal tail
  LogExact,        // symmetric CI on the log scale, exact normal tail
  LogAltmanBland,  // log scale, p = exp(-0.717|z| - 0.416 z^2)
};

std::string_view to_string(PValueMethod method) noexcept;

/// Accepts the CLI spellings "linear", "log", "altman-bland" as well as the
/// enumerator names. Throws DomainError on anything else.
PValueMethod parse_pvalue_method(std::string_view text);

struct PValueResult {
  double se = 0.0;  // on the method's working scale
  double z = 0.0;
  double p = 1.0;
  PValueMethod method = PValueMethod::LinearExact;
  bool floored = false;
};

/// Smallest p ever reported; exact zero is never produced.
inline constexpr double kMinReportedP = 1e-300;

/// Flooring threshold used by the SI-style tables ("<= 0.0001 -> 0.0001").
inline constexpr double kDefaultPFloor = 1e-4;

double normal_cdf(double x);

/// Inverse of normal_cdf by bisection, to 1e-10 in x.
double normal_quantile(double prob);

/// Two-sided critical value. Exactly 1.96 for a 95% interval.
double critical_z(double confidence_level);

PValueResult compute_p(const EffectEstimate& est, PValueMethod method);

struct FlooredP {
  double p;
  bool floored;
};

FlooredP floor_p(double p, double floor = kDefaultPFloor);

/// compute_p followed by floor_p, with `floored` carried into the result.
PValueResult compute_floored_p(const EffectEstimate& est, PValueMethod method,
                               double floor);

/// Log-scale standard error of an estimate, from its interval width.
double log_standard_error(const EffectEstimate& est);

}  // namespace metaaudit
