#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaaudit/csv_io.hpp"
#include "metaaudit/effect_stats.hpp"
#include "metaaudit/search_space.hpp"

namespace metaaudit {

/// Read-only datasets compiled into the library.
enum class FixtureId {
  Table5No2,
  Table5Pm25,
  Table3Counts,
  Si3Cml,
  Si3Meso,
  Si3Exercise,
  Si3Smoking,
};

enum class FixtureKind { Estimates, Counts };

struct FixtureInfo {
  FixtureId id;
  FixtureKind kind;
  std::string_view name;       // e.g. "table5_no2"
  std::string_view file_name;  // e.g. "table5_no2.csv"
  std::string_view csv;
  std::string_view sha256;     // recorded when the library was built
  std::size_t expected_rows;
};

const std::vector<FixtureInfo>& all_fixtures();
const FixtureInfo& fixture_info(FixtureId id);
std::optional<FixtureId> find_fixture(std::string_view name);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// True when the embedded bytes still hash to the recorded digest.
bool verify_fixture(FixtureId id);

/// Rows of an estimates fixture. Parsed leniently: a printed interval that
/// is internally inconsistent is kept and flagged through `valid_interval`.
std::vector<EstimateRecord> fixture_estimates(FixtureId id);

/// How the source tables derived their p-value column.
struct DesignatedMethod {
  PValueMethod method;
  std::optional<double> floor;
};

DesignatedMethod designated_method(FixtureId id);

/// P-value of one fixture row by the designated method. Rows whose interval
/// is unusable fall back to the printed value.
struct FixturePValue {
  std::string study_id;
  PValueResult result;
  std::optional<double> printed;
  bool reconstructed = false;  // printed cell was empty
  bool from_printed = false;   // interval unusable, printed value carried
};

std::vector<FixturePValue> fixture_pvalues(FixtureId id);

/// Table 3 row with the values the source table printed alongside.
struct CountsFixtureRow {
  StudyCounts counts;
  std::string cohort;
  std::uint64_t printed_lags = 0;
  BigInt printed_questions;
  BigInt printed_models;
  BigInt printed_search_space;
};

std::vector<CountsFixtureRow> counts_fixture_rows();

/// Two-column interpretation checklist attached to bilinear verdicts.
std::string_view bilinear_rubric();

}  // namespace metaaudit
