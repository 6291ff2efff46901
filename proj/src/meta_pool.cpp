#include "metaaudit/meta_pool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "metaaudit/error.hpp"

namespace metaaudit {

namespace {

void check_inputs(std::span<const PoolInput> inputs) {
  for (const auto& in : inputs) {
    if (!std::isfinite(in.log_ee)) {
      throw DomainError("pool input '" + in.study_id + "': log_ee must be finite");
    }
    if (!std::isfinite(in.se_log) || in.se_log <= 0.0) {
      throw DomainError("pool input '" + in.study_id + "': se_log must be positive");
    }
  }
}

std::vector<double> inverse_variance_weights(std::span<const PoolInput> inputs,
                                             double tau2) {
  std::vector<double> w;
  w.reserve(inputs.size());
  for (const auto& in : inputs) w.push_back(1.0 / (in.se_log * in.se_log + tau2));
  return w;
}

// Weighted mean, CI and normalized weights from raw (unnormalized) weights.
PooledResult pool_with_weights(std::span<const PoolInput> inputs,
                               const std::vector<double>& w, PoolModel model) {
  const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
  double weighted = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) weighted += w[i] * inputs[i].log_ee;

  PooledResult out;
  out.model = model;
  out.pooled_log_ee = weighted / sum_w;
  out.pooled_se = std::sqrt(1.0 / sum_w);
  out.pooled_ee = std::exp(out.pooled_log_ee);
  out.ci_low = std::exp(out.pooled_log_ee - kPooledCiMultiplier * out.pooled_se);
  out.ci_high = std::exp(out.pooled_log_ee + kPooledCiMultiplier * out.pooled_se);
  out.weights.reserve(w.size());
  for (double wi : w) out.weights.push_back(wi / sum_w);
  return out;
}

void attach_heterogeneity(PooledResult& out, std::span<const PoolInput> inputs) {
  if (inputs.size() < 2) {
    out.q = 0.0;
    out.df = 0;
    out.q_pvalue = 1.0;
    out.i2_percent = 0.0;
    return;
  }
  const CochranQ cq = cochran_q(inputs);
  out.q = cq.q;
  out.df = cq.df;
  out.q_pvalue = cq.p_value;
  out.i2_percent = i_squared(cq.q, cq.df);
}

}  // namespace

PoolInput to_pool_input(const EffectEstimate& est) {
  return {est.study_id, std::log(est.ee), log_standard_error(est)};
}

std::string_view to_string(PoolModel model) noexcept {
  return model == PoolModel::FixedEffect ? "FixedEffect" : "RandomEffects";
}

PooledResult fixed_effect_pool(std::span<const PoolInput> inputs) {
  if (inputs.empty()) throw DomainError("fixed_effect_pool: no inputs");
  check_inputs(inputs);
  PooledResult out = pool_with_weights(
      inputs, inverse_variance_weights(inputs, 0.0), PoolModel::FixedEffect);
  attach_heterogeneity(out, inputs);
  return out;
}

CochranQ cochran_q(std::span<const PoolInput> inputs) {
  if (inputs.size() < 2) {
    throw InsufficientDataError("Cochran Q needs at least 2 studies");
  }
  check_inputs(inputs);
  const std::vector<double> w = inverse_variance_weights(inputs, 0.0);
  const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) mean += w[i] * inputs[i].log_ee;
  mean /= sum_w;

  CochranQ out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double d = inputs[i].log_ee - mean;
    out.q += w[i] * d * d;
  }
  out.df = static_cast<int>(inputs.size()) - 1;
  out.p_value = chi2_sf(out.q, out.df);
  return out;
}

double i_squared(double q, int df) {
  if (df < 1) throw DomainError("i_squared: df must be at least 1");
  if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("i_squared: q must be >= 0");
  if (q == 0.0) return 0.0;
  return std::max(0.0, (q - df) / q) * 100.0;
}

I2Interpretation interpret_i2(double i2) {
  if (!(i2 >= 0.0 && i2 <= 100.0)) {
    throw DomainError("interpret_i2: value must lie in [0, 100]");
  }
  I2Interpretation out;

  struct Threshold {
    double at;
    const char* label;
  };
  static constexpr Threshold kThresholds[] = {{25.0, "low"}, {50.0, "moderate"}, {75.0, "high"}};
  const Threshold* nearest = &kThresholds[0];
  for (const auto& t : kThresholds) {
    if (std::abs(i2 - t.at) < std::abs(i2 - nearest->at)) nearest = &t;
  }
  out.higgins_band = nearest->label;

  struct Range {
    double lo, hi;
    const char* label;
  };
  static constexpr Range kRanges[] = {
      {0.0, 40.0, "might not be important"},
      {30.0, 60.0, "moderate"},
      {50.0, 90.0, "substantial"},
      {75.0, 100.0, "considerable"},
  };
  for (const auto& r : kRanges) {
    if (i2 >= r.lo && i2 <= r.hi) out.handbook_labels.emplace_back(r.label);
  }
  out.summary = out.handbook_labels.back();

  const char* below = nullptr;
  for (const auto& t : kThresholds) {
    if (t.at <= i2) below = t.label;
  }
  if (below != nullptr && out.summary != below) {
    out.note = std::string(below) + "-to-" + out.summary;
  }
  return out;
}

PooledResult dersimonian_laird(std::span<const PoolInput> inputs) {
  if (inputs.size() < 2) {
    throw InsufficientDataError("DerSimonian-Laird needs at least 2 studies");
  }
  check_inputs(inputs);
  const CochranQ cq = cochran_q(inputs);
  const std::vector<double> w = inverse_variance_weights(inputs, 0.0);
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (double wi : w) {
    sum_w += wi;
    sum_w2 += wi * wi;
  }
  const double denom = sum_w - sum_w2 / sum_w;
  if (!(denom > 0.0)) {
    throw DegenerateWeightsError(
        "DerSimonian-Laird: weights concentrate on a single study");
  }
  const double tau2 = std::max(0.0, (cq.q - cq.df) / denom);

  PooledResult out = pool_with_weights(inputs, inverse_variance_weights(inputs, tau2),
                                       PoolModel::RandomEffects);
  out.tau2 = tau2;
  out.q = cq.q;
  out.df = cq.df;
  out.q_pvalue = cq.p_value;
  out.i2_percent = i_squared(cq.q, cq.df);
  return out;
}

double chi2_sf(double x, int df) {
  if (df < 1) throw DomainError("chi2_sf: df must be at least 1");
  if (!(x >= 0.0)) throw DomainError("chi2_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return kMinReportedP;
  return std::max(boost::math::gamma_q(0.5 * df, 0.5 * x), kMinReportedP);
}

}  // namespace metaaudit
