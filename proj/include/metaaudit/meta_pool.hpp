#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metaaudit/effect_stats.hpp"

namespace metaaudit {

struct PoolInput {
  std::string study_id;
  double log_ee = 0.0;
  double se_log = 1.0;
};

/// Log-scale input for pooling; the SE follows the LogExact convention.
PoolInput to_pool_input(const EffectEstimate& est);

enum class PoolModel { FixedEffect, RandomEffects };

std::string_view to_string(PoolModel model) noexcept;

/// Fixed-effect or DerSimonian-Laird pooled estimate. All quantities except
/// pooled_ee and the CI bounds live on the natural-log scale.
struct PooledResult {
  PoolModel model = PoolModel::FixedEffect;
  double pooled_log_ee = 0.0;
  double pooled_se = 0.0;
  double pooled_ee = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
  double tau2 = 0.0;
  double q = 0.0;
  int df = 0;
  double q_pvalue = 1.0;
  double i2_percent = 0.0;
  std::vector<double> weights;  // normalized, in input order
};

/// Multiplier for every pooled CI (no Knapp-Hartung adjustment).
inline constexpr double kPooledCiMultiplier = 1.96;

PooledResult fixed_effect_pool(std::span<const PoolInput> inputs);

struct CochranQ {
  double q = 0.0;
  int df = 0;
  double p_value = 1.0;
};

CochranQ cochran_q(std::span<const PoolInput> inputs);

/// I^2 = max(0, (q - df) / q) * 100, and 0 when q == 0.
double i_squared(double q, int df);

struct I2Interpretation {
  std::string higgins_band;                 // nearest of 25/50/75 thresholds
  std::vector<std::string> handbook_labels;  // every applicable range
  std::string summary;                      // highest applicable range
  std::string note;                         // e.g. "moderate-to-substantial"
};

I2Interpretation interpret_i2(double i2_percent);

PooledResult dersimonian_laird(std::span<const PoolInput> inputs);

/// Survival function of the chi-square distribution.
double chi2_sf(double x, int df);

}  // namespace metaaudit
