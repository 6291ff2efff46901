#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "metaaudit/error.hpp"
#include "metaaudit/meta_pool.hpp"

namespace ma = metaaudit;

namespace {

// Chi-square CDF by composite Simpson on t where u = t^2, which removes the
// u^(k/2 - 1) singularity at the origin for k = 1.
long double simpson_chi2_sf(long double x, int k) {
  const long double c = 2.0L / (std::pow(2.0L, k / 2.0L) * std::tgamma(k / 2.0L));
  auto f = [&](long double t) {
    return c * std::pow(t, static_cast<long double>(k - 1)) * std::exp(-t * t / 2.0L);
  };
  const long double b = std::sqrt(x);
  const int n = 20000;
  const long double h = b / n;
  long double s = f(0.0L) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0L : 2.0L) * f(i * h);
  return 1.0L - s * h / 3.0L;
}

struct OraclePool {
  long double tau2, mu, se, q;
};

// Three-study DerSimonian-Laird written out term by term in long double.
OraclePool dl_three(const long double y[3], const long double s[3]) {
  long double w[3], sw = 0, sw2 = 0, swy = 0, swy2 = 0;
  for (int i = 0; i < 3; ++i) {
    w[i] = 1.0L / (s[i] * s[i]);
    sw += w[i];
    sw2 += w[i] * w[i];
    swy += w[i] * y[i];
    swy2 += w[i] * y[i] * y[i];
  }
  const long double q = swy2 - swy * swy / sw;
  long double tau2 = (q - 2.0L) / (sw - sw2 / sw);
  if (tau2 < 0) tau2 = 0;
  long double rw = 0, rwy = 0;
  for (int i = 0; i < 3; ++i) {
    const long double v = 1.0L / (s[i] * s[i] + tau2);
    rw += v;
    rwy += v * y[i];
  }
  return {tau2, rwy / rw, std::sqrt(1.0L / rw), q};
}

std::vector<ma::PoolInput> inputs(std::initializer_list<std::pair<double, double>> ys) {
  std::vector<ma::PoolInput> out;
  int i = 0;
  for (auto [y, s] : ys) out.push_back({"s" + std::to_string(i++), y, s});
  return out;
}

}  // namespace

TEST(Chi2Sf, ReferencePoints) {
  EXPECT_NEAR(ma::chi2_sf(3.841, 1), 0.0500, 1e-4);
  EXPECT_NEAR(ma::chi2_sf(2.0 * std::log(2.0), 2), 0.5, 1e-10);
  EXPECT_EQ(ma::chi2_sf(0.0, 3), 1.0);
  EXPECT_THROW(ma::chi2_sf(-1.0, 1), ma::DomainError);
  EXPECT_THROW(ma::chi2_sf(1.0, 0), ma::DomainError);
}

TEST(Chi2Sf, MatchesSimpsonQuadrature) {
  for (int k : {1, 2, 3, 4, 7, 12, 20}) {
    for (double x : {0.1, 0.5, 1.0, 2.5, 4.0, 8.0, 15.0, 25.0}) {
      EXPECT_NEAR(ma::chi2_sf(x, k), static_cast<double>(simpson_chi2_sf(x, k)), 1e-9)
          << "x=" << x << " k=" << k;
    }
  }
}

TEST(Chi2Sf, TwoDegreesIsExponential) {
  for (double x = 0.0; x < 30.0; x += 0.37) {
    EXPECT_NEAR(ma::chi2_sf(x, 2), std::exp(-x / 2.0), 1e-14);
  }
}

TEST(FixedEffect, EqualWeightsGiveMean) {
  const auto in = inputs({{0.1, 0.2}, {0.3, 0.2}, {-0.1, 0.2}});
  const auto r = ma::fixed_effect_pool(in);
  EXPECT_NEAR(r.pooled_log_ee, 0.1, 1e-15);
  EXPECT_NEAR(r.pooled_se, 0.2 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.ci_low, std::exp(0.1 - 1.96 * r.pooled_se), 1e-15);
  for (double w : r.weights) EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.q, (0.04 + 0.04) / 0.04, 1e-12);
  EXPECT_EQ(r.df, 2);
}

TEST(FixedEffect, SingleStudyHasNoHeterogeneity) {
  const auto r = ma::fixed_effect_pool(inputs({{0.5, 0.1}}));
  EXPECT_DOUBLE_EQ(r.pooled_log_ee, 0.5);
  EXPECT_EQ(r.df, 0);
  EXPECT_EQ(r.q, 0.0);
  EXPECT_EQ(r.q_pvalue, 1.0);
}

TEST(FixedEffect, RejectsBadInput) {
  EXPECT_THROW(ma::fixed_effect_pool({}), ma::DomainError);
  EXPECT_THROW(ma::fixed_effect_pool(inputs({{0.1, 0.0}})), ma::DomainError);
}

TEST(CochranQ, NeedsTwoStudies) {
  EXPECT_THROW(ma::cochran_q(inputs({{0.1, 0.1}})), ma::InsufficientDataError);
}

TEST(ISquared, Definition) {
  EXPECT_EQ(ma::i_squared(0.0, 3), 0.0);
  EXPECT_EQ(ma::i_squared(2.0, 3), 0.0);
  EXPECT_NEAR(ma::i_squared(10.0, 4), 60.0, 1e-12);
  EXPECT_THROW(ma::i_squared(1.0, 0), ma::DomainError);
}

TEST(InterpretI2, OverlappingRanges) {
  const auto a = ma::interpret_i2(64.1);
  EXPECT_EQ(a.summary, "substantial");
  EXPECT_EQ(a.note, "moderate-to-substantial");
  EXPECT_EQ(a.higgins_band, "high");

  const auto b = ma::interpret_i2(7.4);
  EXPECT_EQ(b.handbook_labels, std::vector<std::string>{"might not be important"});
  EXPECT_EQ(b.higgins_band, "low");
  EXPECT_TRUE(b.note.empty());

  const auto c = ma::interpret_i2(35.0);
  EXPECT_EQ(c.handbook_labels.size(), 2u);
  EXPECT_EQ(c.summary, "moderate");
  EXPECT_EQ(c.note, "low-to-moderate");

  EXPECT_THROW(ma::interpret_i2(101.0), ma::DomainError);
}

TEST(DerSimonianLaird, MatchesBruteForceOracleOnGrid) {
  const long double grid[5] = {-0.6L, -0.15L, 0.0L, 0.2L, 0.9L};
  const long double se_sets[2][3] = {{0.1L, 0.2L, 0.35L}, {0.05L, 0.3L, 0.08L}};
  int cells = 0;
  for (const auto& se : se_sets) {
    for (auto a : grid) {
      for (auto b : grid) {
        for (auto c : grid) {
          const long double y[3] = {a, b, c};
          const auto o = dl_three(y, se);
          const std::vector<ma::PoolInput> in{{"a", static_cast<double>(a),
                                               static_cast<double>(se[0])},
                                              {"b", static_cast<double>(b),
                                               static_cast<double>(se[1])},
                                              {"c", static_cast<double>(c),
                                               static_cast<double>(se[2])}};
          const auto r = ma::dersimonian_laird(in);
          EXPECT_NEAR(r.tau2, static_cast<double>(o.tau2), 1e-10);
          EXPECT_NEAR(r.pooled_log_ee, static_cast<double>(o.mu), 1e-10);
          EXPECT_NEAR(r.pooled_se, static_cast<double>(o.se), 1e-10);
          EXPECT_NEAR(r.q, static_cast<double>(o.q), 1e-10);
          ++cells;
        }
      }
    }
  }
  EXPECT_EQ(cells, 250);
}

TEST(DerSimonianLaird, ZeroTauEqualsFixedEffect) {
  const auto in = inputs({{0.1, 0.2}, {0.12, 0.25}, {0.09, 0.3}});
  const auto dl = ma::dersimonian_laird(in);
  const auto fe = ma::fixed_effect_pool(in);
  ASSERT_EQ(dl.tau2, 0.0);
  EXPECT_EQ(dl.pooled_log_ee, fe.pooled_log_ee);
  EXPECT_EQ(dl.pooled_se, fe.pooled_se);
  EXPECT_EQ(dl.ci_low, fe.ci_low);
  EXPECT_EQ(dl.ci_high, fe.ci_high);
  EXPECT_EQ(dl.weights, fe.weights);
  EXPECT_EQ(dl.model, ma::PoolModel::RandomEffects);
}

TEST(DerSimonianLaird, RandomProperties) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> y(0.0, 0.4);
  std::uniform_real_distribution<double> s(0.05, 0.5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<ma::PoolInput> in;
    const int n = 2 + rep % 12;
    for (int i = 0; i < n; ++i) in.push_back({"s", y(rng), s(rng)});
    const auto dl = ma::dersimonian_laird(in);
    const auto fe = ma::fixed_effect_pool(in);
    EXPECT_GE(dl.tau2, 0.0);
    EXPECT_GE(dl.pooled_se, fe.pooled_se - 1e-15);
    EXPECT_NEAR(std::accumulate(dl.weights.begin(), dl.weights.end(), 0.0), 1.0, 1e-12);
    EXPECT_GE(dl.i2_percent, 0.0);
    EXPECT_LE(dl.i2_percent, 100.0);
    EXPECT_LE(dl.ci_low, dl.pooled_ee);
    EXPECT_GE(dl.ci_high, dl.pooled_ee);
  }
}

TEST(DerSimonianLaird, NeedsTwoStudies) {
  EXPECT_THROW(ma::dersimonian_laird(inputs({{0.1, 0.1}})), ma::InsufficientDataError);
}

TEST(PoolInput, UsesLogScale) {
  ma::EffectEstimate e;
  e.study_id = "x";
  e.ee = 1.5;
  e.cl_low = 1.0;
  e.cl_high = 2.25;
  const auto in = ma::to_pool_input(e);
  EXPECT_NEAR(in.log_ee, std::log(1.5), 1e-15);
  EXPECT_NEAR(in.se_log, std::log(2.25) / 3.92, 1e-15);
}
