#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "metaaudit/effect_stats.hpp"
#include "metaaudit/error.hpp"

namespace ma = metaaudit;
using boost::multiprecision::cpp_bin_float_50;

namespace {

ma::EffectEstimate est(double ee, double lo, double hi) {
  ma::EffectEstimate e;
  e.study_id = "s";
  e.ee = ee;
  e.cl_low = lo;
  e.cl_high = hi;
  return e;
}

double oracle_cdf(double x) {
  const cpp_bin_float_50 v = -cpp_bin_float_50(x) / sqrt(cpp_bin_float_50(2));
  return static_cast<double>(erfc(v) / 2);
}

}  // namespace

TEST(NormalCdf, MatchesFiftyDigitOracleOnGrid) {
  for (int i = 0; i < 1000; ++i) {
    const double x = -8.0 + 16.0 * i / 999.0;
    EXPECT_NEAR(ma::normal_cdf(x), oracle_cdf(x), 1e-10) << "x=" << x;
  }
}

TEST(NormalCdf, SymmetryAndCentre) {
  EXPECT_DOUBLE_EQ(ma::normal_cdf(0.0), 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-6.0, 6.0);
  for (int i = 0; i < 500; ++i) {
    const double x = d(rng);
    EXPECT_NEAR(ma::normal_cdf(x) + ma::normal_cdf(-x), 1.0, 1e-15);
  }
}

TEST(NormalCdf, RejectsNonFinite) {
  EXPECT_THROW(ma::normal_cdf(std::nan("")), ma::DomainError);
}

TEST(NormalQuantile, InvertsCdf) {
  for (double p : {0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999}) {
    EXPECT_NEAR(ma::normal_cdf(ma::normal_quantile(p)), p, 1e-10);
  }
  EXPECT_THROW(ma::normal_quantile(0.0), ma::DomainError);
  EXPECT_THROW(ma::normal_quantile(1.0), ma::DomainError);
}

TEST(CriticalZ, NinetyFivePercentIsTheTabledValue) {
  EXPECT_EQ(ma::critical_z(0.95), 1.96);
  EXPECT_NEAR(ma::critical_z(0.90), 1.644853627, 1e-8);
  EXPECT_NEAR(ma::critical_z(0.99), 2.575829304, 1e-8);
}

TEST(ValidateEstimate, InvariantMessages) {
  try {
    ma::validate_estimate(est(1.1, 1.2, 1.5));
    FAIL();
  } catch (const ma::DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("cl_low <= ee"), std::string::npos);
  }
  EXPECT_THROW(ma::validate_estimate(est(1.6, 1.2, 1.5)), ma::DomainError);
  EXPECT_THROW(ma::validate_estimate(est(0.0, 0.0, 1.5)), ma::DomainError);
  auto e = est(1.0, 0.9, 1.1);
  e.confidence_level = 1.0;
  EXPECT_THROW(ma::validate_estimate(e), ma::DomainError);
  EXPECT_NO_THROW(ma::validate_estimate(est(1.0, 0.9, 1.1)));
}

TEST(ComputeP, LinearExactBritishColumbiaRow) {
  const auto r = ma::compute_p(est(1.13, 1.04, 1.23), ma::PValueMethod::LinearExact);
  EXPECT_NEAR(r.se, 0.19 / 3.92, 1e-15);
  EXPECT_NEAR(r.p, 0.0073, 2e-4);
  EXPECT_FALSE(r.floored);
  EXPECT_EQ(r.method, ma::PValueMethod::LinearExact);
}

TEST(ComputeP, LinearExactAhsmogReconstruction) {
  const auto r = ma::compute_p(est(1.08, 0.85, 1.38), ma::PValueMethod::LinearExact);
  EXPECT_NEAR(r.p, 0.5540, 2e-4);
}

TEST(ComputeP, NullEstimateGivesOne) {
  for (auto m : {ma::PValueMethod::LinearExact, ma::PValueMethod::LogExact,
                 ma::PValueMethod::LogAltmanBland}) {
    EXPECT_DOUBLE_EQ(ma::compute_p(est(1.0, 0.5, 2.0), m).p, 1.0);
  }
}

TEST(ComputeP, AltmanBlandClosedForm) {
  const auto e = est(2.0, 1.2, 3.5);
  const double se = (std::log(3.5) - std::log(1.2)) / (2 * 1.96);
  const double z = std::log(2.0) / se;
  const auto r = ma::compute_p(e, ma::PValueMethod::LogAltmanBland);
  EXPECT_NEAR(r.z, z, 1e-14);
  EXPECT_NEAR(r.p, std::exp(-0.717 * z - 0.416 * z * z), 1e-14);
}

TEST(ComputeP, LogExactAgreesWithAltmanBlandApproximately) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_ee(-1.5, 1.5);
  std::uniform_real_distribution<double> half(0.05, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double l = log_ee(rng);
    const double h = half(rng);
    const auto e = est(std::exp(l), std::exp(l - h), std::exp(l + h));
    const double exact = ma::compute_p(e, ma::PValueMethod::LogExact).p;
    const double ab = ma::compute_p(e, ma::PValueMethod::LogAltmanBland).p;
    EXPECT_NEAR(exact, ab, 0.015);
    EXPECT_GT(exact, 0.0);
    EXPECT_LE(exact, 1.0);
  }
}

TEST(ComputeP, MonotoneInDistanceFromOne) {
  double last = 1.1;
  for (double ee = 1.0; ee < 3.0; ee += 0.05) {
    const auto r = ma::compute_p(est(ee, ee / 1.5, ee * 1.5), ma::PValueMethod::LogExact);
    EXPECT_LT(r.p, last);
    last = r.p;
  }
}

TEST(ComputeP, DegenerateIntervalIsAnError) {
  EXPECT_THROW(ma::compute_p(est(1.2, 1.2, 1.2), ma::PValueMethod::LinearExact),
               ma::DegenerateIntervalError);
}

TEST(ComputeP, ExtremeZNeverReturnsZero) {
  const auto r = ma::compute_p(est(50.0, 49.9, 50.1), ma::PValueMethod::LinearExact);
  EXPECT_GE(r.p, ma::kMinReportedP);
}

TEST(FloorP, BoundaryIsInclusive) {
  EXPECT_TRUE(ma::floor_p(1e-4).floored);
  EXPECT_EQ(ma::floor_p(1e-6).p, 1e-4);
  EXPECT_FALSE(ma::floor_p(0.0002).floored);
  EXPECT_EQ(ma::floor_p(0.0002).p, 0.0002);
  EXPECT_THROW(ma::floor_p(0.0), ma::DomainError);
}

TEST(ComputeFlooredP, CarriesFlag) {
  const auto r = ma::compute_floored_p(est(8.68, 5.77, 13.06), ma::PValueMethod::LogAltmanBland,
                                       ma::kDefaultPFloor);
  EXPECT_TRUE(r.floored);
  EXPECT_EQ(r.p, 1e-4);
  EXPECT_EQ(r.method, ma::PValueMethod::LogAltmanBland);
}

TEST(ParsePValueMethod, Spellings) {
  EXPECT_EQ(ma::parse_pvalue_method("linear"), ma::PValueMethod::LinearExact);
  EXPECT_EQ(ma::parse_pvalue_method("log"), ma::PValueMethod::LogExact);
  EXPECT_EQ(ma::parse_pvalue_method("altman-bland"), ma::PValueMethod::LogAltmanBland);
  EXPECT_EQ(ma::parse_pvalue_method("LogAltmanBland"), ma::PValueMethod::LogAltmanBland);
  EXPECT_THROW(ma::parse_pvalue_method("exact"), ma::DomainError);
}

TEST(LogStandardError, MatchesIntervalWidth) {
  EXPECT_NEAR(ma::log_standard_error(est(1.0, std::exp(-1.96), std::exp(1.96))), 1.0, 1e-15);
}
