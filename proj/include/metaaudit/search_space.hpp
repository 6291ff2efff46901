#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace metaaudit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct StudyCounts {
  std::string study_id;
  std::uint64_t outcomes = 1;
  std::uint64_t predictors = 1;
  std::uint64_t lags = 1;
  std::uint64_t covariates = 0;
};

/// Questions = outcomes * predictors * lags; Models = 2^covariates;
/// SearchSpace = Questions * Models. Exact at any size.
struct SearchSpaceResult {
  BigInt questions;
  BigInt models;
  BigInt search_space;
};

SearchSpaceResult evaluate_counts(const StudyCounts& counts);

/// Minimum, median-inclusive Tukey hinges, median, maximum.
struct FiveNumberSummary {
  Rational minimum;
  Rational lower_hinge;
  Rational median;
  Rational upper_hinge;
  Rational maximum;
};

FiveNumberSummary five_number_summary(std::vector<Rational> values);

struct CorpusSummary {
  FiveNumberSummary outcomes;
  FiveNumberSummary predictors;
  FiveNumberSummary lags;
  FiveNumberSummary covariates;
  FiveNumberSummary questions;
  FiveNumberSummary models;
  FiveNumberSummary search_space;
};

CorpusSummary corpus_summary(std::span<const StudyCounts> studies);

/// "14.5", "13824" - exact decimal when the denominator is a power of 2 or 5,
/// otherwise "num/den".
std::string format_rational(const Rational& value);

/// Table-style display: thousands separators ("13,824"), and above 10^7 two
/// significant figures with an M suffix ("42M").
std::string display_count(const BigInt& value);

}  // namespace metaaudit
