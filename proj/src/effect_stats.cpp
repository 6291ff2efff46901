#include "metaaudit/effect_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metaaudit/error.hpp"

namespace metaaudit {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::DegenerateInterval: return "degenerate interval";
    case ErrorKind::DegenerateWeights: return "degenerate weights";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

namespace {

void require_positive_finite(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DomainError(std::string(name) + " must be a positive finite number");
  }
}

// Two-sided normal tail 2 * (1 - Phi(|z|)), evaluated through erfc so the
// far tail does not cancel to zero.
double two_sided_tail(double z) {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

}  // namespace

void validate_estimate(const EffectEstimate& est) {
  require_positive_finite(est.ee, "ee");
  require_positive_finite(est.cl_low, "cl_low");
  require_positive_finite(est.cl_high, "cl_high");
  if (!(est.cl_low <= est.ee)) {
    throw DomainError("invariant cl_low <= ee violated");
  }
  if (!(est.ee <= est.cl_high)) {
    throw DomainError("invariant ee <= cl_high violated");
  }
  if (!(est.confidence_level > 0.0 && est.confidence_level < 1.0)) {
    throw DomainError("confidence_level must lie strictly between 0 and 1");
  }
}

std::string_view to_string(PValueMethod method) noexcept {
  switch (method) {
    case PValueMethod::LinearExact: return "LinearExact";
    case PValueMethod::LogExact: return "LogExact";
    case PValueMethod::LogAltmanBland: return "LogAltmanBland";
  }
  return "LinearExact";
}

PValueMethod parse_pvalue_method(std::string_view text) {
  if (text == "linear" || text == "LinearExact") return PValueMethod::LinearExact;
  if (text == "log" || text == "LogExact") return PValueMethod::LogExact;
  if (text == "altman-bland" || text == "LogAltmanBland") {
    return PValueMethod::LogAltmanBland;
  }
  throw DomainError("unknown p-value method '" + std::string(text) +
                    "' (expected linear, log or altman-bland)");
}

double normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("normal_cdf: argument must be finite");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw DomainError("normal_quantile: probability must lie in (0, 1)");
  }
  double lo = -40.0;
  double hi = 40.0;
  while (hi - lo > 1e-11) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double critical_z(double confidence_level) {
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw DomainError("confidence_level must lie strictly between 0 and 1");
  }
  if (confidence_level == 0.95) return 1.96;
  return normal_quantile(1.0 - (1.0 - confidence_level) / 2.0);
}

double log_standard_error(const EffectEstimate& est) {
  validate_estimate(est);
  if (est.cl_high == est.cl_low) {
    throw DegenerateIntervalError("zero-width confidence interval for '" +
                                  est.study_id + "'");
  }
  return (std::log(est.cl_high) - std::log(est.cl_low)) /
         (2.0 * critical_z(est.confidence_level));
}

PValueResult compute_p(const EffectEstimate& est, PValueMethod method) {
  validate_estimate(est);
  if (est.cl_high == est.cl_low) {
    throw DegenerateIntervalError("zero-width confidence interval for '" +
                                  est.study_id + "'");
  }
  const double z_crit = critical_z(est.confidence_level);

  PValueResult out;
  out.method = method;
  switch (method) {
    case PValueMethod::LinearExact:
      out.se = (est.cl_high - est.cl_low) / (2.0 * z_crit);
      out.z = (est.ee - 1.0) / out.se;
      out.p = two_sided_tail(out.z);
      break;
    case PValueMethod::LogExact:
      out.se = (std::log(est.cl_high) - std::log(est.cl_low)) / (2.0 * z_crit);
      out.z = std::log(est.ee) / out.se;
      out.p = two_sided_tail(out.z);
      break;
    case PValueMethod::LogAltmanBland: {
      out.se = (std::log(est.cl_high) - std::log(est.cl_low)) / (2.0 * z_crit);
      out.z = std::log(est.ee) / out.se;
      const double az = std::abs(out.z);
      out.p = std::exp(-0.717 * az - 0.416 * out.z * out.z);
      break;
    }
  }
  out.p = std::clamp(out.p, kMinReportedP, 1.0);
  return out;
}

FlooredP floor_p(double p, double floor) {
  if (!(floor > 0.0 && floor < 1.0)) {
    throw DomainError("floor_p: floor must lie in (0, 1)");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("floor_p: p must lie in (0, 1]");
  }
  return {std::max(p, floor), p <= floor};
}

PValueResult compute_floored_p(const EffectEstimate& est, PValueMethod method,
                               double floor) {
  PValueResult out = compute_p(est, method);
  const FlooredP fp = floor_p(out.p, floor);
  out.p = fp.p;
  out.floored = fp.floored;
  return out;
}

}  // namespace metaaudit
