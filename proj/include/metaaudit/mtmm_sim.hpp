#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace metaaudit {

enum class Scenario { Null, Effect, PHacked, Mixture };

std::string_view to_string(Scenario scenario) noexcept;
Scenario parse_scenario(std::string_view text);

struct SimConfig {
  Scenario scenario = Scenario::Null;
  std::uint32_t n_studies = 1;
  std::uint64_t m_tests = 1;       // PHacked / Mixture
  double effect_mean_z = 0.0;      // Effect
  double mixture_fraction = 0.0;   // Mixture
  std::uint64_t seed = 0;

  void validate() const;
};

enum class StudyTag { Null, Effect, Hacked };

std::string_view to_string(StudyTag tag) noexcept;

/// Identifier of the random stream layout; bump when draws would change.
inline constexpr std::string_view kGeneratorId = "philox4x32-10/v1";

/// Illustrative extreme-hacking preset: m_tests equal to the median analysis
/// search space of the air-quality/asthma base papers.
inline constexpr std::uint64_t kMedianSearchSpacePreset = 13'824;

struct SimResult {
  std::vector<double> pvalues;
  std::vector<StudyTag> labels;
  SimConfig config_echo;
  std::string_view generator = kGeneratorId;
};

/// Null: p ~ U(0,1). Effect: z ~ N(mean, 1), p = 2(1 - Phi(|z|)).
/// PHacked: p = min of m_tests uniforms. Mixture: each study is hacked with
/// probability mixture_fraction, otherwise null.
///
/// Study i draws only from Philox counters tagged with i, so results do not
/// depend on n_studies or evaluation order. The first uniform of a PHacked
/// study is the Null draw of the same study, which makes (PHacked, m = 1) and
/// (Mixture, fraction = 0) reproduce Null exactly.
SimResult simulate(const SimConfig& config);

/// 1 - (1 - p)^m, the CDF of the minimum of m uniforms.
double min_p_cdf(double p, std::uint64_t m);

}  // namespace metaaudit
