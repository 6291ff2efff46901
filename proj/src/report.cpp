#include "metaaudit/report.hpp"

#include <fstream>
#include <map>

#include "metaaudit/error.hpp"
#include "metaaudit/fixtures.hpp"
#include "metaaudit/number_format.hpp"
#include "metaaudit/version.hpp"

namespace metaaudit {

namespace {

constexpr std::string_view kFixturePrefix = "fixture:";

constexpr const char* kPoolingCaveat =
    "DerSimonian-Laird on the natural-log scale with SE from the 95% interval width and a "
    "1.96 multiplier; odds ratios, relative risks and hazard ratios are pooled together. "
    "Published pooled values computed under other conventions can differ.";

Json num(double v) { return round_sig6(v); }

Json big_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) {
    return v.convert_to<std::uint64_t>();
  }
  return v.str();
}

BigInt big_from_json(const Json& j) {
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw SchemaError("expected an integer");
}

Json rational_json(const Rational& r) {
  const BigInt den = boost::multiprecision::denominator(r);
  const BigInt num_part = boost::multiprecision::numerator(r);
  if (den == 1) return big_json(num_part);
  const BigInt limit = BigInt(1) << 53;
  if (den == 2 && abs(num_part) < limit) return r.convert_to<double>();
  return format_rational(r);
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(big_from_json(j));
  if (j.is_number_float()) return Rational(j.get<double>());
  if (!j.is_string()) throw SchemaError("expected a rational value");
  const std::string s = j.get<std::string>();
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    return Rational(BigInt(s.substr(0, dot) + frac), scale);
  }
  return Rational(BigInt(s));
}

Json summary_json(const FiveNumberSummary& s) {
  return Json{{"minimum", rational_json(s.minimum)},
              {"lower_hinge", rational_json(s.lower_hinge)},
              {"median", rational_json(s.median)},
              {"upper_hinge", rational_json(s.upper_hinge)},
              {"maximum", rational_json(s.maximum)}};
}

FiveNumberSummary summary_from_json(const Json& j) {
  return {rational_from_json(j.at("minimum")), rational_from_json(j.at("lower_hinge")),
          rational_from_json(j.at("median")), rational_from_json(j.at("upper_hinge")),
          rational_from_json(j.at("maximum"))};
}

PoolModel parse_pool_model(const std::string& s) {
  if (s == "FixedEffect") return PoolModel::FixedEffect;
  if (s == "RandomEffects") return PoolModel::RandomEffects;
  throw SchemaError("unknown pooling model '" + s + "'");
}

Json classification_json(const PlotClassification& c) {
  return Json{{"label", to_string(c.label)},
              {"slope", num(c.slope)},
              {"intercept", num(c.intercept)},
              {"ks_stat", num(c.ks_stat)},
              {"ks_pvalue", num(c.ks_pvalue)},
              {"breakpoint", c.breakpoint ? Json(*c.breakpoint) : Json(nullptr)},
              {"sse_one_segment", num(c.sse_one_segment)},
              {"sse_two_segment", num(c.sse_two_segment)},
              {"frac_below_alpha", num(c.frac_below_alpha)}};
}

PlotClassification classification_from_json(const Json& j) {
  PlotClassification c;
  c.label = parse_plot_label(j.at("label").get<std::string>());
  c.slope = j.at("slope").get<double>();
  c.intercept = j.at("intercept").get<double>();
  c.ks_stat = j.at("ks_stat").get<double>();
  c.ks_pvalue = j.at("ks_pvalue").get<double>();
  if (!j.at("breakpoint").is_null()) c.breakpoint = j.at("breakpoint").get<int>();
  c.sse_one_segment = j.at("sse_one_segment").get<double>();
  c.sse_two_segment = j.at("sse_two_segment").get<double>();
  c.frac_below_alpha = j.at("frac_below_alpha").get<double>();
  return c;
}

Json pooled_json(const PooledSection& s) {
  const PooledResult& r = s.result;
  Json weights = Json::array();
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    weights.push_back(Json{{"study_id", s.study_ids.at(i)}, {"weight", num(r.weights[i])}});
  }
  return Json{{"model", to_string(r.model)},
              {"pooled_ee", num(r.pooled_ee)},
              {"ci_low", num(r.ci_low)},
              {"ci_high", num(r.ci_high)},
              {"pooled_log_ee", num(r.pooled_log_ee)},
              {"pooled_se", num(r.pooled_se)},
              {"tau2", num(r.tau2)},
              {"q", num(r.q)},
              {"df", r.df},
              {"q_pvalue", num(r.q_pvalue)},
              {"i2_percent", num(r.i2_percent)},
              {"weights", weights},
              {"i2_interpretation",
               Json{{"higgins_band", s.i2.higgins_band},
                    {"handbook_labels", s.i2.handbook_labels},
                    {"summary", s.i2.summary},
                    {"note", s.i2.note}}},
              {"caveat", s.caveat}};
}

PooledSection pooled_from_json(const Json& j) {
  PooledSection s;
  PooledResult& r = s.result;
  r.model = parse_pool_model(j.at("model").get<std::string>());
  r.pooled_ee = j.at("pooled_ee").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.pooled_log_ee = j.at("pooled_log_ee").get<double>();
  r.pooled_se = j.at("pooled_se").get<double>();
  r.tau2 = j.at("tau2").get<double>();
  r.q = j.at("q").get<double>();
  r.df = j.at("df").get<int>();
  r.q_pvalue = j.at("q_pvalue").get<double>();
  r.i2_percent = j.at("i2_percent").get<double>();
  for (const auto& w : j.at("weights")) {
    s.study_ids.push_back(w.at("study_id").get<std::string>());
    r.weights.push_back(w.at("weight").get<double>());
  }
  const Json& i2 = j.at("i2_interpretation");
  s.i2.higgins_band = i2.at("higgins_band").get<std::string>();
  s.i2.handbook_labels = i2.at("handbook_labels").get<std::vector<std::string>>();
  s.i2.summary = i2.at("summary").get<std::string>();
  s.i2.note = i2.at("note").get<std::string>();
  s.caveat = j.at("caveat").get<std::string>();
  return s;
}

Json group_json(const GroupReport& g) {
  Json estimates = Json::array();
  for (const auto& e : g.estimates) {
    estimates.push_back(Json{{"study_id", e.study_id},
                             {"label", e.label},
                             {"ee", num(e.ee)},
                             {"cl_low", num(e.cl_low)},
                             {"cl_high", num(e.cl_high)},
                             {"confidence_level", num(e.confidence_level)}});
  }
  Json pvalues = Json::array();
  for (const auto& p : g.pvalues) {
    pvalues.push_back(Json{{"study_id", p.study_id},
                           {"p", num(p.result.p)},
                           {"method", to_string(p.result.method)},
                           {"floored", p.result.floored},
                           {"reconstructed", p.reconstructed},
                           {"se", num(p.result.se)},
                           {"z", num(p.result.z)}});
  }
  Json points = Json::array();
  for (const auto& pt : g.points) points.push_back(Json::array({pt.rank, num(pt.p)}));
  return Json{{"group", g.group},
              {"estimates", estimates},
              {"pvalues", pvalues},
              {"pooled", g.pooled ? pooled_json(*g.pooled) : Json(nullptr)},
              {"notes", g.notes},
              {"plot", Json{{"points", points},
                            {"classification", classification_json(g.classification)}}}};
}

GroupReport group_from_json(const Json& j) {
  GroupReport g;
  g.group = j.at("group").get<std::string>();
  for (const auto& e : j.at("estimates")) {
    EffectEstimate est;
    est.study_id = e.at("study_id").get<std::string>();
    est.label = e.at("label").get<std::string>();
    est.ee = e.at("ee").get<double>();
    est.cl_low = e.at("cl_low").get<double>();
    est.cl_high = e.at("cl_high").get<double>();
    est.confidence_level = e.at("confidence_level").get<double>();
    if (g.group != kUngroupedKey) est.group = g.group;
    g.estimates.push_back(std::move(est));
  }
  for (const auto& p : j.at("pvalues")) {
    PValueEntry entry;
    entry.study_id = p.at("study_id").get<std::string>();
    entry.result.p = p.at("p").get<double>();
    entry.result.method = parse_pvalue_method(p.at("method").get<std::string>());
    entry.result.floored = p.at("floored").get<bool>();
    entry.result.se = p.at("se").get<double>();
    entry.result.z = p.at("z").get<double>();
    entry.reconstructed = p.at("reconstructed").get<bool>();
    g.pvalues.push_back(std::move(entry));
  }
  if (!j.at("pooled").is_null()) g.pooled = pooled_from_json(j.at("pooled"));
  g.notes = j.at("notes").get<std::vector<std::string>>();
  const Json& plot = j.at("plot");
  for (const auto& pt : plot.at("points")) {
    g.points.push_back({pt.at(0).get<int>(), pt.at(1).get<double>()});
  }
  g.classification = classification_from_json(plot.at("classification"));
  return g;
}

Json search_space_json(const SearchSpaceSection& s) {
  Json per_study = Json::array();
  for (const auto& row : s.per_study) {
    per_study.push_back(Json{{"study_id", row.counts.study_id},
                             {"outcomes", row.counts.outcomes},
                             {"predictors", row.counts.predictors},
                             {"lags", row.counts.lags},
                             {"covariates", row.counts.covariates},
                             {"questions", big_json(row.result.questions)},
                             {"models", big_json(row.result.models)},
                             {"search_space", big_json(row.result.search_space)},
                             {"display", display_count(row.result.search_space)}});
  }
  Json summary = nullptr;
  if (s.summary) {
    const CorpusSummary& c = *s.summary;
    summary = Json{{"outcomes", summary_json(c.outcomes)},
                   {"predictors", summary_json(c.predictors)},
                   {"lags", summary_json(c.lags)},
                   {"covariates", summary_json(c.covariates)},
                   {"questions", summary_json(c.questions)},
                   {"models", summary_json(c.models)},
                   {"search_space", summary_json(c.search_space)}};
  }
  return Json{{"per_study", per_study}, {"summary", summary}};
}

SearchSpaceSection search_space_from_json(const Json& j) {
  SearchSpaceSection s;
  for (const auto& row : j.at("per_study")) {
    StudySearchSpace st;
    st.counts.study_id = row.at("study_id").get<std::string>();
    st.counts.outcomes = row.at("outcomes").get<std::uint64_t>();
    st.counts.predictors = row.at("predictors").get<std::uint64_t>();
    st.counts.lags = row.at("lags").get<std::uint64_t>();
    st.counts.covariates = row.at("covariates").get<std::uint64_t>();
    st.result.questions = big_from_json(row.at("questions"));
    st.result.models = big_from_json(row.at("models"));
    st.result.search_space = big_from_json(row.at("search_space"));
    s.per_study.push_back(std::move(st));
  }
  const Json& sum = j.at("summary");
  if (!sum.is_null()) {
    s.summary = CorpusSummary{summary_from_json(sum.at("outcomes")),
                              summary_from_json(sum.at("predictors")),
                              summary_from_json(sum.at("lags")),
                              summary_from_json(sum.at("covariates")),
                              summary_from_json(sum.at("questions")),
                              summary_from_json(sum.at("models")),
                              summary_from_json(sum.at("search_space"))};
  }
  return s;
}

template <typename Fn>
auto tagged(const std::string& group, const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "[group " + group + ", stage " + stage + "] " + e.what());
  }
}

std::string stem_of(const std::string& source) {
  if (source.starts_with(kFixturePrefix)) return source.substr(kFixturePrefix.size());
  return std::filesystem::path(source).stem().string();
}

std::vector<EstimateRecord> load_records(const std::string& source) {
  if (source.starts_with(kFixturePrefix)) {
    const auto id = find_fixture(source.substr(kFixturePrefix.size()));
    if (!id || fixture_info(*id).kind != FixtureKind::Estimates) {
      throw IoError("no bundled estimates fixture named '" + source + "'");
    }
    return fixture_estimates(*id);
  }
  return load_estimate_records(source);
}

std::vector<StudyCounts> load_counts(const std::string& source) {
  if (source.starts_with(kFixturePrefix)) {
    const auto id = find_fixture(source.substr(kFixturePrefix.size()));
    if (!id || fixture_info(*id).kind != FixtureKind::Counts) {
      throw IoError("no bundled counts fixture named '" + source + "'");
    }
    return parse_counts_csv(fixture_info(*id).csv);
  }
  return load_counts_csv(source);
}

GroupReport audit_group(const std::string& key, const std::vector<const EstimateRecord*>& rows,
                        const ClassifierConfig& config, PValueMethod method,
                        std::optional<double> floor) {
  GroupReport g;
  g.group = key;
  std::vector<PoolInput> pool_inputs;
  std::vector<std::string> pool_ids;
  tagged(key, "pvalues", [&] {
    for (const EstimateRecord* rec : rows) {
      const EffectEstimate& est = rec->estimate;
      g.estimates.push_back(est);
      PValueEntry entry;
      entry.study_id = est.study_id;
      entry.reconstructed = rec->has_reported_p_column && !rec->reported_p;
      if (rec->valid_interval) {
        entry.result = floor ? compute_floored_p(est, method, *floor) : compute_p(est, method);
        pool_inputs.push_back(to_pool_input(est));
        pool_ids.push_back(est.study_id);
      } else {
        if (!rec->reported_p) {
          throw ValidationError(rec->line, "study '" + est.study_id +
                                               "' has an unusable interval and no printed p");
        }
        entry.result.method = method;
        entry.result.p = *rec->reported_p;
        if (floor) entry.result.floored = entry.result.p <= *floor;
        g.notes.push_back("study " + est.study_id +
                          ": printed interval is inconsistent; printed p carried, "
                          "excluded from pooling");
      }
      g.pvalues.push_back(std::move(entry));
    }
  });

  tagged(key, "pooling", [&] {
    try {
      PooledSection s;
      s.result = dersimonian_laird(pool_inputs);
      s.study_ids = pool_ids;
      s.i2 = interpret_i2(s.result.i2_percent);
      s.caveat = kPoolingCaveat;
      g.pooled = std::move(s);
    } catch (const InsufficientDataError& e) {
      g.notes.push_back(std::string("pooling: insufficient data (") + e.what() + ")");
    } catch (const DegenerateWeightsError& e) {
      g.notes.push_back(std::string("pooling: degenerate weights (") + e.what() + ")");
    }
  });

  tagged(key, "plot", [&] {
    std::vector<double> ps;
    for (const auto& entry : g.pvalues) ps.push_back(entry.result.p);
    const PValuePlot plot = build_plot(ps);
    g.points = plot.points();
    g.classification = classify(plot, config);
  });
  return g;
}

}  // namespace

Json to_json(const AuditReport& r) {
  Json groups = Json::array();
  for (const auto& g : r.groups) groups.push_back(group_json(g));
  const ClassifierConfig& c = r.config;
  return Json{
      {"dataset_id", r.dataset_id},
      {"toolkit_version", r.toolkit_version},
      {"generator", r.generator},
      {"config", Json{{"method", to_string(r.method)},
                      {"floor", r.floor ? num(*r.floor) : Json(nullptr)},
                      {"alpha", num(c.alpha)},
                      {"slope_lo", num(c.slope_lo)},
                      {"slope_hi", num(c.slope_hi)},
                      {"ks_alpha", num(c.ks_alpha)},
                      {"effect_fraction", num(c.effect_fraction)},
                      {"min_n_for_verdict", c.min_n_for_verdict},
                      {"bilinear_gain", num(c.bilinear_gain)}}},
      {"groups", groups},
      {"search_space", r.search_space ? search_space_json(*r.search_space) : Json(nullptr)},
      {"rubric", r.rubric ? Json(*r.rubric) : Json(nullptr)},
      {"caveats", r.caveats}};
}

AuditReport report_from_json(const Json& j) {
  try {
    AuditReport r;
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.toolkit_version = j.at("toolkit_version").get<std::string>();
    r.generator = j.at("generator").get<std::string>();
    const Json& c = j.at("config");
    r.method = parse_pvalue_method(c.at("method").get<std::string>());
    if (!c.at("floor").is_null()) r.floor = c.at("floor").get<double>();
    r.config.alpha = c.at("alpha").get<double>();
    r.config.slope_lo = c.at("slope_lo").get<double>();
    r.config.slope_hi = c.at("slope_hi").get<double>();
    r.config.ks_alpha = c.at("ks_alpha").get<double>();
    r.config.effect_fraction = c.at("effect_fraction").get<double>();
    r.config.min_n_for_verdict = c.at("min_n_for_verdict").get<std::size_t>();
    r.config.bilinear_gain = c.at("bilinear_gain").get<double>();
    for (const auto& g : j.at("groups")) r.groups.push_back(group_from_json(g));
    if (!j.at("search_space").is_null()) {
      r.search_space = search_space_from_json(j.at("search_space"));
    }
    if (!j.at("rubric").is_null()) r.rubric = j.at("rubric").get<std::string>();
    r.caveats = j.at("caveats").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed audit report: ") + e.what());
  }
}

std::string serialize_report(const AuditReport& report) {
  return to_json(report).dump(2) + "\n";
}

AuditReport audit_records(const std::string& dataset_id,
                          const std::vector<EstimateRecord>& records,
                          const std::optional<std::vector<StudyCounts>>& counts,
                          const ClassifierConfig& config, PValueMethod method,
                          std::optional<double> floor) {
  config.validate();
  if (floor && !(*floor > 0.0 && *floor < 1.0)) throw DomainError("floor must lie in (0, 1)");

  AuditReport report;
  report.dataset_id = dataset_id;
  report.toolkit_version = kToolkitVersion;
  report.generator = kAuditGenerator;
  report.config = config;
  report.method = method;
  report.floor = floor;

  std::vector<std::string> order;
  std::map<std::string, std::vector<const EstimateRecord*>> by_group;
  for (const auto& rec : records) {
    const std::string key = rec.estimate.group.value_or(kUngroupedKey);
    auto [it, inserted] = by_group.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&rec);
  }
  bool bilinear = false;
  for (const auto& key : order) {
    report.groups.push_back(audit_group(key, by_group[key], config, method, floor));
    bilinear = bilinear || report.groups.back().classification.label ==
                               PlotLabel::BilinearMixture;
  }

  if (counts) {
    report.search_space = tagged("search_space", "counts", [&] {
      SearchSpaceSection s;
      for (const auto& c : *counts) s.per_study.push_back({c, evaluate_counts(c)});
      if (!counts->empty()) s.summary = corpus_summary(*counts);
      return s;
    });
    report.caveats.push_back(
        "Analysis search space is a lower bound computed from counts reported in each "
        "base paper.");
  }
  if (bilinear) report.rubric = std::string(bilinear_rubric());
  report.caveats.push_back(
      "Only reported intervals are audited; the underlying base-paper data are not "
      "reanalysed.");
  return report;
}

AuditReport run_audit(const AuditRequest& request) {
  if (request.estimates.empty()) throw DomainError("no estimates input given");
  std::vector<EstimateRecord> records;
  std::string derived_id;
  for (const auto& source : request.estimates) {
    auto part = tagged("input", "load", [&] { return load_records(source); });
    records.insert(records.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    if (!derived_id.empty()) derived_id += '+';
    derived_id += stem_of(source);
  }
  std::optional<std::vector<StudyCounts>> counts;
  if (request.counts) {
    counts = tagged("search_space", "load", [&] { return load_counts(*request.counts); });
  }
  const std::string id = request.dataset_id.empty() ? derived_id : request.dataset_id;
  return audit_records(id, records, counts, request.config, request.method, request.floor);
}

void write_report(const AuditReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << serialize_report(report);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string sanitize_file_stem(std::string_view key) {
  std::string out;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

std::vector<std::filesystem::path> write_group_plots(const AuditReport& report,
                                                     const std::filesystem::path& dir,
                                                     PlotFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& g : report.groups) {
    std::vector<double> ps;
    for (const auto& pt : g.points) ps.push_back(pt.p);
    const PValuePlot plot = build_plot(ps);
    RenderOptions opt;
    opt.alpha = report.config.alpha;
    opt.color = false;
    opt.title = g.group;
    const auto path =
        dir / (sanitize_file_stem(g.group) + (format == PlotFormat::Svg ? ".svg" : ".txt"));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << render_plot(plot, g.classification, format, opt);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    written.push_back(path);
  }
  return written;
}

}  // namespace metaaudit
