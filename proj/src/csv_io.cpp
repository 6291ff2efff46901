#include "metaaudit/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "metaaudit/error.hpp"

namespace metaaudit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// One physical line, RFC 4180 quoting ("" inside quotes is a literal quote).
std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        cell.push_back(c);
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      cells.push_back(was_quoted ? cell : std::string(trim(cell)));
      cell.clear();
      was_quoted = false;
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) throw ValidationError(line_no, "malformed CSV: unterminated quoted field");
  cells.push_back(was_quoted ? cell : std::string(trim(cell)));
  return cells;
}

double parse_real(const std::string& cell, std::size_t line, std::string_view column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  const auto res = std::from_chars(begin, end, value);
  if (cell.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
    throw ValidationError(line, "column '" + std::string(column) + "': '" + cell +
                                    "' is not a number");
  }
  return value;
}

std::uint64_t parse_count(const std::string& cell, std::size_t line, std::string_view column) {
  std::uint64_t value = 0;
  const char* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, value);
  if (cell.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ValidationError(line, "column '" + std::string(column) + "': '" + cell +
                                    "' is not a nonnegative integer");
  }
  return value;
}

std::string describe_breach(const EffectEstimate& e) {
  if (!(e.ee > 0.0)) return "ee > 0";
  if (!(e.cl_low > 0.0)) return "cl_low > 0";
  if (!(e.cl_high > 0.0)) return "cl_high > 0";
  if (!(e.cl_low <= e.ee)) return "cl_low ≤ ee";
  if (!(e.ee <= e.cl_high)) return "ee ≤ cl_high";
  if (!(e.confidence_level > 0.0 && e.confidence_level < 1.0)) {
    return "0 < confidence_level < 1";
  }
  return {};
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_line(line, line_no);
    if (!have_header) {
      table.header_ = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header_.size()) {
      throw ValidationError(line_no, "expected " + std::to_string(table.header_.size()) +
                                         " fields, found " + std::to_string(cells.size()));
    }
    table.rows_.push_back({line_no, std::move(cells)});
  }
  if (!have_header) throw SchemaError("CSV input has no header row");
  return table;
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) {
    throw SchemaError("missing required column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header_.begin());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buf.str();
}

std::vector<EstimateRecord> parse_estimate_records(std::string_view text, bool strict) {
  const CsvTable table = CsvTable::parse(text);
  const std::size_t c_id = table.column("study_id");
  const std::size_t c_label = table.column("label");
  const std::size_t c_group = table.column("group");
  const std::size_t c_ee = table.column("ee");
  const std::size_t c_low = table.column("cl_low");
  const std::size_t c_high = table.column("cl_high");
  const bool has_level = table.has_column("confidence_level");
  const bool has_reported = table.has_column("reported_p");
  const std::size_t c_level = has_level ? table.column("confidence_level") : 0;
  const std::size_t c_reported = has_reported ? table.column("reported_p") : 0;

  std::vector<EstimateRecord> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    const auto& cells = row.cells;
    EstimateRecord rec;
    rec.line = row.line;
    rec.estimate.study_id = cells[c_id];
    if (rec.estimate.study_id.empty()) throw ValidationError(row.line, "empty study_id");
    rec.estimate.label = cells[c_label];
    if (!cells[c_group].empty()) rec.estimate.group = cells[c_group];
    rec.estimate.ee = parse_real(cells[c_ee], row.line, "ee");
    rec.estimate.cl_low = parse_real(cells[c_low], row.line, "cl_low");
    rec.estimate.cl_high = parse_real(cells[c_high], row.line, "cl_high");
    if (has_level && !cells[c_level].empty()) {
      rec.estimate.confidence_level = parse_real(cells[c_level], row.line, "confidence_level");
    }
    rec.has_reported_p_column = has_reported;
    if (has_reported && !cells[c_reported].empty()) {
      rec.reported_p = parse_real(cells[c_reported], row.line, "reported_p");
    }

    const std::string breach = describe_breach(rec.estimate);
    rec.valid_interval = breach.empty();
    if (strict && !breach.empty()) {
      throw ValidationError(row.line, "study '" + rec.estimate.study_id +
                                          "' violates invariant " + breach);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EstimateRecord> load_estimate_records(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_estimate_records(text, true);
  } catch (const ValidationError& e) {
    throw ValidationError(e.row(), e.detail() + " in '" + path.string() + "'");
  }
}

std::vector<EffectEstimate> load_estimates_csv(const std::filesystem::path& path) {
  std::vector<EffectEstimate> out;
  for (auto& rec : load_estimate_records(path)) out.push_back(std::move(rec.estimate));
  return out;
}

std::vector<StudyCounts> parse_counts_csv(std::string_view text) {
  const CsvTable table = CsvTable::parse(text);
  const std::size_t c_id = table.column("study_id");
  const std::size_t c_out = table.column("outcomes");
  const std::size_t c_pred = table.column("predictors");
  const std::size_t c_lags = table.column("lags");
  const std::size_t c_cov = table.column("covariates");

  std::vector<StudyCounts> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    StudyCounts c;
    c.study_id = row.cells[c_id];
    if (c.study_id.empty()) throw ValidationError(row.line, "empty study_id");
    c.outcomes = parse_count(row.cells[c_out], row.line, "outcomes");
    c.predictors = parse_count(row.cells[c_pred], row.line, "predictors");
    c.lags = parse_count(row.cells[c_lags], row.line, "lags");
    c.covariates = parse_count(row.cells[c_cov], row.line, "covariates");
    if (c.outcomes < 1) throw ValidationError(row.line, "invariant outcomes ≥ 1 violated");
    if (c.predictors < 1) throw ValidationError(row.line, "invariant predictors ≥ 1 violated");
    if (c.lags < 1) throw ValidationError(row.line, "invariant lags ≥ 1 violated");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<StudyCounts> load_counts_csv(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_counts_csv(text);
  } catch (const ValidationError& e) {
    throw ValidationError(e.row(), e.detail() + " in '" + path.string() + "'");
  }
}

}  // namespace metaaudit
