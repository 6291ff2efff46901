#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaaudit/csv_io.hpp"
#include "metaaudit/effect_stats.hpp"
#include "metaaudit/meta_pool.hpp"
#include "metaaudit/pvalue_plot.hpp"
#include "metaaudit/render.hpp"
#include "metaaudit/search_space.hpp"

namespace metaaudit {

using Json = nlohmann::ordered_json;

struct PValueEntry {
  std::string study_id;
  PValueResult result;
  bool reconstructed = false;  // source had no printed p-value for this row
};

struct PooledSection {
  PooledResult result;
  std::vector<std::string> study_ids;  // aligned with result.weights
  I2Interpretation i2;
  std::string caveat;
};

struct GroupReport {
  std::string group;
  std::vector<EffectEstimate> estimates;
  std::vector<PValueEntry> pvalues;
  std::optional<PooledSection> pooled;  // empty when pooling is not possible
  std::vector<PlotPoint> points;
  PlotClassification classification;
  std::vector<std::string> notes;
};

struct StudySearchSpace {
  StudyCounts counts;
  SearchSpaceResult result;
};

struct SearchSpaceSection {
  std::vector<StudySearchSpace> per_study;
  std::optional<CorpusSummary> summary;  // empty for a header-only counts file
};

struct AuditReport {
  std::string dataset_id;
  std::string toolkit_version;
  std::string generator;
  ClassifierConfig config;
  PValueMethod method = PValueMethod::LinearExact;
  std::optional<double> floor;
  std::vector<GroupReport> groups;
  std::optional<SearchSpaceSection> search_space;
  std::optional<std::string> rubric;  // set iff some group is BilinearMixture
  std::vector<std::string> caveats;
};

inline constexpr const char* kAuditGenerator = "metaaudit-audit";
inline constexpr const char* kUngroupedKey = "(ungrouped)";

/// Every double passes through round_sig6, so serialization is idempotent.
Json to_json(const AuditReport& report);
AuditReport report_from_json(const Json& json);

/// Two-space indented JSON followed by a newline.
std::string serialize_report(const AuditReport& report);

struct AuditRequest {
  /// CSV paths; "fixture:<name>" selects a bundled estimates fixture.
  std::vector<std::string> estimates;
  /// CSV path or "fixture:table3_counts".
  std::optional<std::string> counts;
  ClassifierConfig config;
  PValueMethod method = PValueMethod::LinearExact;
  std::optional<double> floor;
  std::string dataset_id;  // derived from the inputs when empty
};

/// Loads the inputs and runs the full pipeline. Failures are rethrown with
/// their original kind and a "[group G, stage S]" prefix.
AuditReport run_audit(const AuditRequest& request);

/// Pipeline over rows already in memory.
AuditReport audit_records(const std::string& dataset_id,
                          const std::vector<EstimateRecord>& records,
                          const std::optional<std::vector<StudyCounts>>& counts,
                          const ClassifierConfig& config, PValueMethod method,
                          std::optional<double> floor);

void write_report(const AuditReport& report, const std::filesystem::path& path);

/// One file per group, named after the sanitized group key. Returns the paths.
std::vector<std::filesystem::path> write_group_plots(const AuditReport& report,
                                                     const std::filesystem::path& dir,
                                                     PlotFormat format);

/// File-name-safe version of a group key ("PM2.5" stays, "a/b" -> "a_b").
std::string sanitize_file_stem(std::string_view key);

}  // namespace metaaudit
