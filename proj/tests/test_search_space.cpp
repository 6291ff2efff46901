#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "metaaudit/error.hpp"
#include "metaaudit/fixtures.hpp"
#include "metaaudit/search_space.hpp"

namespace ma = metaaudit;

namespace {

ma::StudyCounts counts(std::uint64_t o, std::uint64_t p, std::uint64_t l, std::uint64_t c) {
  return {"x", o, p, l, c};
}

}  // namespace

TEST(EvaluateCounts, BamseRow) {
  const auto r = ma::evaluate_counts(counts(7, 3, 4, 6));
  EXPECT_EQ(r.questions, 84);
  EXPECT_EQ(r.models, 64);
  EXPECT_EQ(r.search_space, 5376);
}

TEST(EvaluateCounts, PiamaRowIsExact) {
  EXPECT_EQ(ma::evaluate_counts(counts(5, 4, 8, 18)).search_space, 41'943'040);
  EXPECT_EQ(ma::evaluate_counts(counts(8, 4, 4, 18)).search_space, 33'554'432);
}

TEST(EvaluateCounts, ZeroCovariatesMeansOneModel) {
  EXPECT_EQ(ma::evaluate_counts(counts(2, 3, 1, 0)).models, 1);
}

TEST(EvaluateCounts, HugeCovariateCountsStayExact) {
  const auto r = ma::evaluate_counts(counts(3, 1, 1, 200));
  ma::BigInt expect = 3;
  expect <<= 200;
  EXPECT_EQ(r.search_space, expect);
}

TEST(EvaluateCounts, RejectsZeroFactors) {
  EXPECT_THROW(ma::evaluate_counts(counts(0, 1, 1, 1)), ma::DomainError);
  EXPECT_THROW(ma::evaluate_counts(counts(1, 0, 1, 1)), ma::DomainError);
  EXPECT_THROW(ma::evaluate_counts(counts(1, 1, 0, 1)), ma::DomainError);
}

TEST(FiveNumberSummary, MedianInclusiveHinges) {
  std::vector<ma::Rational> odd{1, 2, 3, 4, 5};
  const auto s = ma::five_number_summary(odd);
  EXPECT_EQ(s.lower_hinge, 2);
  EXPECT_EQ(s.median, 3);
  EXPECT_EQ(s.upper_hinge, 4);

  std::vector<ma::Rational> even{1, 2, 3, 4, 5, 6};
  const auto e = ma::five_number_summary(even);
  EXPECT_EQ(e.lower_hinge, 2);
  EXPECT_EQ(e.median, ma::Rational(7, 2));
  EXPECT_EQ(e.upper_hinge, 5);

  std::vector<ma::Rational> one{7};
  const auto o = ma::five_number_summary(one);
  EXPECT_EQ(o.lower_hinge, 7);
  EXPECT_EQ(o.upper_hinge, 7);
  EXPECT_THROW(ma::five_number_summary({}), ma::DomainError);
}

TEST(FiveNumberSummary, OrderedAndPermutationInvariant) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> v(0, 1000);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<ma::Rational> xs(1 + rep % 23);
    for (auto& x : xs) x = v(rng);
    const auto a = ma::five_number_summary(xs);
    EXPECT_LE(a.minimum, a.lower_hinge);
    EXPECT_LE(a.lower_hinge, a.median);
    EXPECT_LE(a.median, a.upper_hinge);
    EXPECT_LE(a.upper_hinge, a.maximum);
    std::shuffle(xs.begin(), xs.end(), rng);
    const auto b = ma::five_number_summary(xs);
    EXPECT_EQ(a.lower_hinge, b.lower_hinge);
    EXPECT_EQ(a.upper_hinge, b.upper_hinge);
  }
}

TEST(CorpusSummary, AirQualityBasePapers) {
  std::vector<ma::StudyCounts> studies;
  for (const auto& row : ma::counts_fixture_rows()) studies.push_back(row.counts);
  ASSERT_EQ(studies.size(), 19u);
  const auto s = ma::corpus_summary(studies);
  EXPECT_EQ(s.search_space.minimum, 96);
  EXPECT_EQ(s.search_space.lower_hinge, 1536);
  EXPECT_EQ(s.search_space.median, 13824);
  EXPECT_EQ(s.search_space.upper_hinge, 221184);
  EXPECT_EQ(s.search_space.maximum, 41'943'040);
  EXPECT_EQ(s.models.lower_hinge, 96);
  EXPECT_EQ(s.models.median, 256);
  EXPECT_EQ(s.models.upper_hinge, 3072);
  EXPECT_EQ(s.questions.median, 24);
  EXPECT_EQ(s.questions.upper_hinge, 84);
  // Printed lower quartile is 15; median-inclusive hinges give 14.5.
  EXPECT_EQ(s.questions.lower_hinge, ma::Rational(29, 2));
}

TEST(FormatRational, DecimalOrFraction) {
  EXPECT_EQ(ma::format_rational(ma::Rational(29, 2)), "14.5");
  EXPECT_EQ(ma::format_rational(ma::Rational(13824)), "13824");
  EXPECT_EQ(ma::format_rational(ma::Rational(1, 3)), "1/3");
  EXPECT_EQ(ma::format_rational(ma::Rational(-3, 8)), "-0.375");
  EXPECT_EQ(ma::format_rational(ma::Rational(1, 20)), "0.05");
}

TEST(DisplayCount, ThousandsAndMillions) {
  EXPECT_EQ(ma::display_count(96), "96");
  EXPECT_EQ(ma::display_count(13824), "13,824");
  EXPECT_EQ(ma::display_count(491520), "491,520");
  EXPECT_EQ(ma::display_count(10'000'000), "10,000,000");
  EXPECT_EQ(ma::display_count(41'943'040), "42M");
  // Two significant figures: the printed table shows 33M for this product.
  EXPECT_EQ(ma::display_count(33'554'432), "34M");
  EXPECT_EQ(ma::display_count(34'500'000), "34M");
  EXPECT_EQ(ma::display_count(35'500'000), "36M");
  EXPECT_EQ(ma::display_count(1'234'567'890), "1,200M");
}
