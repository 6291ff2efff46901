#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "metaaudit/effect_stats.hpp"
#include "metaaudit/search_space.hpp"

namespace metaaudit {

/// One parsed row of an estimates file plus the optional `reported_p` cell.
struct EstimateRecord {
  EffectEstimate estimate;
  std::size_t line = 0;
  bool has_reported_p_column = false;
  std::optional<double> reported_p;  // empty cell => value to be reconstructed
  bool valid_interval = true;        // 0 < cl_low <= ee <= cl_high
};

/// Columns study_id,label,group,ee,cl_low,cl_high[,confidence_level][,reported_p];
/// other columns are ignored. In strict mode a row that breaks an
/// EffectEstimate invariant fails the whole parse; lenient mode (fixtures)
/// only flags it through `valid_interval`.
std::vector<EstimateRecord> parse_estimate_records(std::string_view text,
                                                   bool strict = true);

std::vector<EstimateRecord> load_estimate_records(const std::filesystem::path& path);

std::vector<EffectEstimate> load_estimates_csv(const std::filesystem::path& path);

/// Columns study_id,outcomes,predictors,lags,covariates; other columns ignored.
std::vector<StudyCounts> parse_counts_csv(std::string_view text);

std::vector<StudyCounts> load_counts_csv(const std::filesystem::path& path);

/// Whole-file read; throws IoError.
std::string read_text_file(const std::filesystem::path& path);

/// Header-addressed CSV table (RFC 4180 quoting), used by the loaders.
class CsvTable {
 public:
  static CsvTable parse(std::string_view text);

  bool has_column(std::string_view name) const;
  /// Throws SchemaError naming the missing column.
  std::size_t column(std::string_view name) const;

  struct Row {
    std::size_t line;
    std::vector<std::string> cells;
  };
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

}  // namespace metaaudit
