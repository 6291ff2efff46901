#include "metaaudit/mtmm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "metaaudit/effect_stats.hpp"
#include "metaaudit/error.hpp"
#include "metaaudit/philox.hpp"

namespace metaaudit {

namespace {

enum Stream : std::uint32_t { kTestDraws = 0, kNormalDraws = 1, kSelection = 2 };

class StudyStream {
 public:
  StudyStream(std::uint64_t seed, std::uint32_t study, Stream stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        study_(study),
        stream_(stream) {}

  // k-th uniform of this stream: two per Philox block.
  double uniform(std::uint64_t k) const {
    const std::uint64_t block_index = k / 2;
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_index), study_,
                                  stream_, static_cast<std::uint32_t>(block_index >> 32)};
    const auto out = Philox4x32::block(ctr, key_);
    return k % 2 == 0 ? uniform_open01(out[0], out[1]) : uniform_open01(out[2], out[3]);
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t study_;
  std::uint32_t stream_;
};

double min_of_uniforms(const StudyStream& s, std::uint64_t m) {
  double best = 1.0;
  for (std::uint64_t k = 0; k < m; ++k) best = std::min(best, s.uniform(k));
  return best;
}

}  // namespace

std::string_view to_string(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::Null: return "null";
    case Scenario::Effect: return "effect";
    case Scenario::PHacked: return "phacked";
    case Scenario::Mixture: return "mixture";
  }
  return "null";
}

Scenario parse_scenario(std::string_view text) {
  for (Scenario s : {Scenario::Null, Scenario::Effect, Scenario::PHacked, Scenario::Mixture}) {
    if (text == to_string(s)) return s;
  }
  throw DomainError("unknown scenario '" + std::string(text) +
                    "' (expected null, effect, phacked or mixture)");
}

std::string_view to_string(StudyTag tag) noexcept {
  switch (tag) {
    case StudyTag::Null: return "null";
    case StudyTag::Effect: return "effect";
    case StudyTag::Hacked: return "hacked";
  }
  return "null";
}

void SimConfig::validate() const {
  if (n_studies < 1) throw DomainError("n_studies must be >= 1");
  if (m_tests < 1) throw DomainError("m_tests must be >= 1");
  if (!std::isfinite(effect_mean_z) || effect_mean_z < 0.0) {
    throw DomainError("effect_mean_z must be a finite value >= 0");
  }
  if (!(mixture_fraction >= 0.0 && mixture_fraction <= 1.0)) {
    throw DomainError("mixture_fraction must lie in [0, 1]");
  }
}

SimResult simulate(const SimConfig& config) {
  config.validate();
  SimResult out;
  out.config_echo = config;
  out.pvalues.reserve(config.n_studies);
  out.labels.reserve(config.n_studies);

  for (std::uint32_t i = 0; i < config.n_studies; ++i) {
    const StudyStream tests(config.seed, i, kTestDraws);
    double p = 1.0;
    StudyTag tag = StudyTag::Null;
    switch (config.scenario) {
      case Scenario::Null:
        p = tests.uniform(0);
        break;
      case Scenario::Effect: {
        const StudyStream normals(config.seed, i, kNormalDraws);
        const double u1 = normals.uniform(0);
        const double u2 = normals.uniform(1);
        const double z = config.effect_mean_z +
                         std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        p = std::erfc(std::abs(z) / std::numbers::sqrt2);
        tag = StudyTag::Effect;
        break;
      }
      case Scenario::PHacked:
        p = min_of_uniforms(tests, config.m_tests);
        tag = StudyTag::Hacked;
        break;
      case Scenario::Mixture: {
        const StudyStream select(config.seed, i, kSelection);
        if (select.uniform(0) < config.mixture_fraction) {
          p = min_of_uniforms(tests, config.m_tests);
          tag = StudyTag::Hacked;
        } else {
          p = tests.uniform(0);
        }
        break;
      }
    }
    out.pvalues.push_back(std::clamp(p, kMinReportedP, 1.0));
    out.labels.push_back(tag);
  }
  return out;
}

double min_p_cdf(double p, std::uint64_t m) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("min_p_cdf: p must lie in [0, 1]");
  if (m < 1) throw DomainError("min_p_cdf: m must be >= 1");
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(m) * std::log1p(-p));
}

}  // namespace metaaudit
