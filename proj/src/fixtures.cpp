#include "metaaudit/fixtures.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <memory>

#include <openssl/evp.h>

#include "fixture_data.hpp"
#include "metaaudit/error.hpp"

namespace metaaudit {

namespace {

struct Spec {
  FixtureId id;
  FixtureKind kind;
  std::string_view name;
  std::size_t rows;
};

constexpr std::array<Spec, 7> kSpecs{{
    {FixtureId::Table5No2, FixtureKind::Estimates, "table5_no2", 13},
    {FixtureId::Table5Pm25, FixtureKind::Estimates, "table5_pm25", 5},
    {FixtureId::Table3Counts, FixtureKind::Counts, "table3_counts", 19},
    {FixtureId::Si3Cml, FixtureKind::Estimates, "si3_cml", 12},
    {FixtureId::Si3Meso, FixtureKind::Estimates, "si3_meso", 10},
    {FixtureId::Si3Exercise, FixtureKind::Estimates, "si3_exercise", 69},
    {FixtureId::Si3Smoking, FixtureKind::Estimates, "si3_smoking", 102},
}};

std::vector<FixtureInfo> build_table() {
  std::vector<FixtureInfo> out;
  for (const Spec& spec : kSpecs) {
    const detail::EmbeddedFixture* hit = nullptr;
    for (std::size_t i = 0; i < detail::kEmbeddedFixtureCount; ++i) {
      if (spec.name == detail::kEmbeddedFixtures[i].name) hit = &detail::kEmbeddedFixtures[i];
    }
    if (hit == nullptr) throw IoError("fixture '" + std::string(spec.name) + "' not embedded");
    out.push_back({spec.id, spec.kind, spec.name, hit->file_name, hit->csv, hit->sha256,
                   spec.rows});
  }
  return out;
}

BigInt parse_big(const std::string& text, std::size_t line) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError(line, "'" + text + "' is not a nonnegative integer");
  }
  return BigInt(text);
}

std::uint64_t parse_u64(const std::string& text, std::size_t line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError(line, "'" + text + "' is not a nonnegative integer");
  }
  return v;
}

}  // namespace

const std::vector<FixtureInfo>& all_fixtures() {
  static const std::vector<FixtureInfo> table = build_table();
  return table;
}

const FixtureInfo& fixture_info(FixtureId id) {
  for (const auto& info : all_fixtures()) {
    if (info.id == id) return info;
  }
  throw DomainError("unknown fixture id");
}

std::optional<FixtureId> find_fixture(std::string_view name) {
  if (name.ends_with(".csv")) name.remove_suffix(4);
  for (const auto& info : all_fixtures()) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

bool verify_fixture(FixtureId id) {
  const auto& info = fixture_info(id);
  return sha256_hex(info.csv) == info.sha256;
}

std::vector<EstimateRecord> fixture_estimates(FixtureId id) {
  const auto& info = fixture_info(id);
  if (info.kind != FixtureKind::Estimates) {
    throw DomainError("fixture '" + std::string(info.name) + "' holds counts, not estimates");
  }
  return parse_estimate_records(info.csv, false);
}

DesignatedMethod designated_method(FixtureId id) {
  switch (id) {
    case FixtureId::Table5No2:
    case FixtureId::Table5Pm25:
      return {PValueMethod::LinearExact, std::nullopt};
    case FixtureId::Si3Cml:
    case FixtureId::Si3Meso:
    case FixtureId::Si3Exercise:
    case FixtureId::Si3Smoking:
      return {PValueMethod::LogAltmanBland, kDefaultPFloor};
    case FixtureId::Table3Counts:
      break;
  }
  throw DomainError("fixture '" + std::string(fixture_info(id).name) +
                    "' has no p-value column");
}

std::vector<FixturePValue> fixture_pvalues(FixtureId id) {
  const DesignatedMethod dm = designated_method(id);
  std::vector<FixturePValue> out;
  for (const auto& rec : fixture_estimates(id)) {
    FixturePValue fp;
    fp.study_id = rec.estimate.study_id;
    fp.printed = rec.reported_p;
    fp.reconstructed = rec.has_reported_p_column && !rec.reported_p;
    if (rec.valid_interval) {
      fp.result = dm.floor ? compute_floored_p(rec.estimate, dm.method, *dm.floor)
                           : compute_p(rec.estimate, dm.method);
    } else {
      if (!rec.reported_p) {
        throw ValidationError(rec.line, "unusable interval and no printed p-value");
      }
      fp.from_printed = true;
      fp.result.method = dm.method;
      fp.result.p = *rec.reported_p;
      fp.result.floored = dm.floor && *rec.reported_p <= *dm.floor;
    }
    out.push_back(std::move(fp));
  }
  return out;
}

std::vector<CountsFixtureRow> counts_fixture_rows() {
  const auto& info = fixture_info(FixtureId::Table3Counts);
  const CsvTable table = CsvTable::parse(info.csv);
  const auto counts = parse_counts_csv(info.csv);
  const std::size_t c_cohort = table.column("cohort");
  const std::size_t c_lags = table.column("printed_lags");
  const std::size_t c_q = table.column("printed_questions");
  const std::size_t c_m = table.column("printed_models");
  const std::size_t c_s = table.column("printed_search_space");
  std::vector<CountsFixtureRow> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& row = table.rows()[i];
    CountsFixtureRow r;
    r.counts = counts[i];
    r.cohort = row.cells[c_cohort];
    r.printed_lags = parse_u64(row.cells[c_lags], row.line);
    r.printed_questions = parse_big(row.cells[c_q], row.line);
    r.printed_models = parse_big(row.cells[c_m], row.line);
    r.printed_search_space = parse_big(row.cells[c_s], row.line);
    out.push_back(std::move(r));
  }
  return out;
}

std::string_view bilinear_rubric() { return detail::kBilinearRubric; }

}  // namespace metaaudit
