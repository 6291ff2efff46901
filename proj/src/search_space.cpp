#include "metaaudit/search_space.hpp"

#include <algorithm>

#include "metaaudit/error.hpp"

namespace metaaudit {

namespace {

Rational median_of(const std::vector<Rational>& sorted, std::size_t first,
                   std::size_t count) {
  const std::size_t mid = first + count / 2;
  if (count % 2 == 1) return sorted[mid];
  return (sorted[mid - 1] + sorted[mid]) / 2;
}

std::vector<Rational> column(std::span<const StudyCounts> studies,
                             const std::vector<SearchSpaceResult>& results,
                             int which) {
  std::vector<Rational> out;
  out.reserve(studies.size());
  for (std::size_t i = 0; i < studies.size(); ++i) {
    switch (which) {
      case 0: out.emplace_back(studies[i].outcomes); break;
      case 1: out.emplace_back(studies[i].predictors); break;
      case 2: out.emplace_back(studies[i].lags); break;
      case 3: out.emplace_back(studies[i].covariates); break;
      case 4: out.emplace_back(results[i].questions); break;
      case 5: out.emplace_back(results[i].models); break;
      default: out.emplace_back(results[i].search_space); break;
    }
  }
  return out;
}

std::string group_thousands(const std::string& digits) {
  std::string out;
  const std::size_t lead = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
  out.append(digits, 0, lead);
  for (std::size_t i = lead; i < digits.size(); i += 3) {
    out.push_back(',');
    out.append(digits, i, 3);
  }
  return out;
}

}  // namespace

SearchSpaceResult evaluate_counts(const StudyCounts& c) {
  if (c.outcomes == 0) throw DomainError("study '" + c.study_id + "': outcomes must be >= 1");
  if (c.predictors == 0) {
    throw DomainError("study '" + c.study_id + "': predictors must be >= 1");
  }
  if (c.lags == 0) throw DomainError("study '" + c.study_id + "': lags must be >= 1");

  SearchSpaceResult r;
  r.questions = BigInt(c.outcomes) * c.predictors * c.lags;
  r.models = BigInt(1);
  r.models <<= c.covariates;
  r.search_space = r.questions * r.models;
  return r;
}

FiveNumberSummary five_number_summary(std::vector<Rational> values) {
  if (values.empty()) throw DomainError("summary of an empty column");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  // Median-inclusive halves: for odd n each half carries the median.
  const std::size_t half = (n + 1) / 2;

  FiveNumberSummary s;
  s.minimum = values.front();
  s.maximum = values.back();
  s.median = median_of(values, 0, n);
  s.lower_hinge = median_of(values, 0, half);
  s.upper_hinge = median_of(values, n - half, half);
  return s;
}

CorpusSummary corpus_summary(std::span<const StudyCounts> studies) {
  if (studies.empty()) throw DomainError("corpus_summary: empty corpus");
  std::vector<SearchSpaceResult> results;
  results.reserve(studies.size());
  for (const auto& s : studies) results.push_back(evaluate_counts(s));

  CorpusSummary out;
  out.outcomes = five_number_summary(column(studies, results, 0));
  out.predictors = five_number_summary(column(studies, results, 1));
  out.lags = five_number_summary(column(studies, results, 2));
  out.covariates = five_number_summary(column(studies, results, 3));
  out.questions = five_number_summary(column(studies, results, 4));
  out.models = five_number_summary(column(studies, results, 5));
  out.search_space = five_number_summary(column(studies, results, 6));
  return out;
}

std::string format_rational(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();

  // Terminating decimal iff den = 2^a 5^b.
  BigInt rest = den;
  unsigned twos = 0;
  unsigned fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();

  const unsigned places = std::max(twos, fives);
  BigInt scale = 1;
  for (unsigned i = 0; i < places; ++i) scale *= 10;
  const bool negative = num < 0;
  const BigInt scaled = (negative ? BigInt(-num) : num) * scale / den;
  std::string digits = scaled.str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return negative ? "-" + digits : digits;
}

std::string display_count(const BigInt& value) {
  static const BigInt kThreshold = 10'000'000;
  if (value <= kThreshold) return group_thousands(value.str());

  // Two significant figures, round half to even, in millions.
  std::string digits = value.str();
  BigInt unit = 1;
  for (std::size_t i = 2; i < digits.size(); ++i) unit *= 10;
  BigInt q = value / unit;
  const BigInt r = value % unit;
  if (2 * r > unit || (2 * r == unit && q % 2 == 1)) q += 1;
  const BigInt rounded = q * unit;
  const BigInt millions = rounded / 1'000'000;
  return group_thousands(millions.str()) + "M";
}

}  // namespace metaaudit
