// metaaudit: command-line front end for the meta-analysis audit toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metaaudit/csv_io.hpp"
#include "metaaudit/effect_stats.hpp"
#include "metaaudit/error.hpp"
#include "metaaudit/fixtures.hpp"
#include "metaaudit/meta_pool.hpp"
#include "metaaudit/mtmm_sim.hpp"
#include "metaaudit/number_format.hpp"
#include "metaaudit/pvalue_plot.hpp"
#include "metaaudit/render.hpp"
#include "metaaudit/report.hpp"
#include "metaaudit/search_space.hpp"
#include "metaaudit/version.hpp"

namespace ma = metaaudit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

int exit_code_for(ma::ErrorKind kind) {
  return kind == ma::ErrorKind::Io ? kExitIo : kExitInput;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ma::IoError("cannot write '" + out_path + "'");
  out << text;
  if (!out) throw ma::IoError("failed writing '" + out_path + "'");
}

std::vector<ma::EstimateRecord> load_rows(const std::string& source) {
  constexpr std::string_view prefix = "fixture:";
  if (source.starts_with(prefix)) {
    const auto id = ma::find_fixture(source.substr(prefix.size()));
    if (!id) throw ma::IoError("no bundled fixture named '" + source + "'");
    return ma::fixture_estimates(*id);
  }
  return ma::load_estimate_records(source);
}

std::vector<ma::StudyCounts> load_count_rows(const std::string& source) {
  if (source == "fixture:table3_counts") {
    return ma::parse_counts_csv(ma::fixture_info(ma::FixtureId::Table3Counts).csv);
  }
  return ma::load_counts_csv(source);
}

std::vector<ma::EstimateRecord> filter_group(std::vector<ma::EstimateRecord> rows,
                                             const std::string& group) {
  if (group.empty()) return rows;
  std::vector<ma::EstimateRecord> out;
  for (auto& r : rows) {
    if (r.estimate.group.value_or(ma::kUngroupedKey) == group) out.push_back(std::move(r));
  }
  if (out.empty()) throw ma::DomainError("no rows in group '" + group + "'");
  return out;
}

ma::PValueResult row_pvalue(const ma::EstimateRecord& rec, ma::PValueMethod method,
                            std::optional<double> floor) {
  if (!rec.valid_interval) {
    if (!rec.reported_p) {
      throw ma::ValidationError(rec.line, "unusable interval and no printed p-value");
    }
    ma::PValueResult r;
    r.method = method;
    r.p = *rec.reported_p;
    r.floored = floor && r.p <= *floor;
    return r;
  }
  return floor ? ma::compute_floored_p(rec.estimate, method, *floor)
               : ma::compute_p(rec.estimate, method);
}

struct CommonOptions {
  std::string input;
  std::string method = "linear";
  std::optional<double> floor;
  std::string group;
  std::string out;
};

int cmd_pvalues(const CommonOptions& o) {
  const auto method = ma::parse_pvalue_method(o.method);
  const auto rows = filter_group(load_rows(o.input), o.group);
  std::ostringstream s;
  s << "study_id,group,p,method,floored,reconstructed,se,z\n";
  for (const auto& rec : rows) {
    const auto r = row_pvalue(rec, method, o.floor);
    const bool reconstructed = rec.has_reported_p_column && !rec.reported_p;
    s << rec.estimate.study_id << ',' << rec.estimate.group.value_or("") << ','
      << ma::format_sig6(r.p) << ',' << ma::to_string(r.method) << ','
      << (r.floored ? "true" : "false") << ',' << (reconstructed ? "true" : "false") << ','
      << ma::format_sig6(r.se) << ',' << ma::format_sig6(r.z) << '\n';
  }
  emit(s.str(), o.out);
  return kExitOk;
}

int cmd_pool(const CommonOptions& o, const std::string& model) {
  if (model != "fixed" && model != "dl") {
    throw ma::DomainError("--model must be 'fixed' or 'dl'");
  }
  const auto rows = filter_group(load_rows(o.input), o.group);
  std::vector<std::string> order;
  std::map<std::string, std::vector<ma::PoolInput>> groups;
  for (const auto& rec : rows) {
    if (!rec.valid_interval) continue;
    const std::string key = rec.estimate.group.value_or(ma::kUngroupedKey);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(ma::to_pool_input(rec.estimate));
  }
  ma::Json out = ma::Json::array();
  for (const auto& key : order) {
    const auto& inputs = groups[key];
    const auto r = model == "fixed" ? ma::fixed_effect_pool(inputs)
                                    : ma::dersimonian_laird(inputs);
    const auto i2 = ma::interpret_i2(r.i2_percent);
    out.push_back(ma::Json{{"group", key},
                           {"n", inputs.size()},
                           {"model", ma::to_string(r.model)},
                           {"pooled_ee", ma::round_sig6(r.pooled_ee)},
                           {"ci_low", ma::round_sig6(r.ci_low)},
                           {"ci_high", ma::round_sig6(r.ci_high)},
                           {"tau2", ma::round_sig6(r.tau2)},
                           {"q", ma::round_sig6(r.q)},
                           {"df", r.df},
                           {"q_pvalue", ma::round_sig6(r.q_pvalue)},
                           {"i2_percent", ma::round_sig6(r.i2_percent)},
                           {"i2_summary", i2.summary}});
  }
  emit(out.dump(2) + "\n", o.out);
  return kExitOk;
}

int cmd_plot(const CommonOptions& o, const std::string& format, double alpha, bool no_color) {
  const auto method = ma::parse_pvalue_method(o.method);
  const auto rows = filter_group(load_rows(o.input), o.group);
  std::vector<double> ps;
  for (const auto& rec : rows) ps.push_back(row_pvalue(rec, method, o.floor).p);
  ma::ClassifierConfig config;
  config.alpha = alpha;
  config.validate();
  const auto plot = ma::build_plot(ps);
  const auto cls = ma::classify(plot, config);
  ma::RenderOptions opt;
  opt.alpha = alpha;
  opt.color = !no_color && o.out.empty();
  opt.title = o.group;
  emit(ma::render_plot(plot, cls, ma::parse_plot_format(format), opt), o.out);
  return kExitOk;
}

int cmd_searchspace(const CommonOptions& o) {
  const auto counts = load_count_rows(o.input);
  std::ostringstream s;
  s << "study_id,outcomes,predictors,lags,covariates,questions,models,search_space,display\n";
  for (const auto& c : counts) {
    const auto r = ma::evaluate_counts(c);
    s << c.study_id << ',' << c.outcomes << ',' << c.predictors << ',' << c.lags << ','
      << c.covariates << ',' << r.questions << ',' << r.models << ',' << r.search_space << ','
      << '"' << ma::display_count(r.search_space) << "\"\n";
  }
  if (!counts.empty()) {
    const auto sum = ma::corpus_summary(counts);
    s << "\ncolumn,minimum,lower_hinge,median,upper_hinge,maximum\n";
    const std::pair<const char*, const ma::FiveNumberSummary*> cols[] = {
        {"outcomes", &sum.outcomes},     {"predictors", &sum.predictors},
        {"lags", &sum.lags},             {"covariates", &sum.covariates},
        {"questions", &sum.questions},   {"models", &sum.models},
        {"search_space", &sum.search_space}};
    for (const auto& [name, f] : cols) {
      s << name << ',' << ma::format_rational(f->minimum) << ','
        << ma::format_rational(f->lower_hinge) << ',' << ma::format_rational(f->median) << ','
        << ma::format_rational(f->upper_hinge) << ',' << ma::format_rational(f->maximum)
        << '\n';
    }
  }
  emit(s.str(), o.out);
  return kExitOk;
}

struct SimOptions {
  std::string scenario = "null";
  std::uint32_t n = 100;
  std::uint64_t m = 1;
  double effect_z = 0.0;
  double fraction = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimOptions& o) {
  ma::SimConfig cfg;
  cfg.scenario = ma::parse_scenario(o.scenario);
  cfg.n_studies = o.n;
  cfg.m_tests = o.m;
  cfg.effect_mean_z = o.effect_z;
  cfg.mixture_fraction = o.fraction;
  cfg.seed = o.seed;
  const auto result = ma::simulate(cfg);
  ma::Json studies = ma::Json::array();
  for (std::size_t i = 0; i < result.pvalues.size(); ++i) {
    studies.push_back(ma::Json{{"index", i},
                               {"p", ma::round_sig6(result.pvalues[i])},
                               {"tag", ma::to_string(result.labels[i])}});
  }
  ma::Json doc{{"generator", result.generator},
               {"toolkit_version", ma::kToolkitVersion},
               {"config", ma::Json{{"scenario", ma::to_string(cfg.scenario)},
                                   {"n_studies", cfg.n_studies},
                                   {"m_tests", cfg.m_tests},
                                   {"effect_mean_z", ma::round_sig6(cfg.effect_mean_z)},
                                   {"mixture_fraction", ma::round_sig6(cfg.mixture_fraction)},
                                   {"seed", cfg.seed}}},
               {"studies", studies}};
  if (result.pvalues.size() >= 1) {
    const auto cls = ma::classify(ma::build_plot(result.pvalues));
    doc["classification"] = ma::to_string(cls.label);
  }
  doc["caveat"] =
      "Idealized model: independent tests and studies, no correlation among the analyses "
      "within a study.";
  emit(doc.dump(2) + "\n", o.out);
  return kExitOk;
}

struct AuditOptions {
  std::vector<std::string> estimates;
  std::string counts;
  bool bundled = false;
  std::string method = "linear";
  std::optional<double> floor;
  double alpha = 0.05;
  std::string out;
  std::string plots_dir;
  std::string plot_format = "svg";
  std::string dataset_id;
};

int cmd_audit(const AuditOptions& o) {
  ma::AuditRequest req;
  req.estimates = o.estimates;
  if (!o.counts.empty()) req.counts = o.counts;
  if (o.bundled) {
    if (req.estimates.empty()) {
      req.estimates = {"fixture:table5_no2", "fixture:table5_pm25"};
    }
    if (!req.counts) req.counts = "fixture:table3_counts";
  }
  if (req.estimates.empty()) throw ma::DomainError("audit needs estimates CSV paths or --bundled");
  req.method = ma::parse_pvalue_method(o.method);
  req.floor = o.floor;
  req.config.alpha = o.alpha;
  req.dataset_id = o.dataset_id;
  const auto report = ma::run_audit(req);
  if (o.out.empty() || o.out == "-") {
    std::cout << ma::serialize_report(report);
  } else {
    ma::write_report(report, o.out);
  }
  if (!o.plots_dir.empty()) {
    ma::write_group_plots(report, o.plots_dir, ma::parse_plot_format(o.plot_format));
  }
  return kExitOk;
}

int cmd_fixtures(const std::string& action, const std::string& name, const std::string& out) {
  if (action == "list") {
    std::ostringstream s;
    s << "name,kind,rows,sha256\n";
    for (const auto& f : ma::all_fixtures()) {
      s << f.name << ',' << (f.kind == ma::FixtureKind::Counts ? "counts" : "estimates") << ','
        << f.expected_rows << ',' << f.sha256 << '\n';
    }
    emit(s.str(), out);
    return kExitOk;
  }
  if (action == "verify") {
    bool all_ok = true;
    for (const auto& f : ma::all_fixtures()) {
      const bool ok = ma::verify_fixture(f.id);
      all_ok = all_ok && ok;
      std::cout << (ok ? "ok      " : "CORRUPT ") << f.name << '\n';
    }
    return all_ok ? kExitOk : kExitInternal;
  }
  if (action == "export") {
    const auto id = ma::find_fixture(name);
    if (!id) throw ma::DomainError("no bundled fixture named '" + name + "'");
    emit(std::string(ma::fixture_info(*id).csv), out);
    return kExitOk;
  }
  throw ma::DomainError("fixtures action must be list, verify or export");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit meta-analyses of observational studies: p-values from intervals, "
               "pooling, p-value plots, analysis search space and simulation."};
  app.set_version_flag("--version", std::string(ma::kToolkitVersion));
  app.require_subcommand(1);

  CommonOptions common;
  auto add_input = [&](CLI::App* sub, const char* what) {
    sub->add_option("input", common.input, what)->required();
    sub->add_option("-o,--out", common.out, "Output file (default stdout)");
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", common.method, "linear | log | altman-bland")
        ->capture_default_str();
    sub->add_option("--floor", common.floor, "Report p <= floor as floor");
    sub->add_option("--group", common.group, "Restrict to one group");
  };

  auto* pvalues = app.add_subcommand("pvalues", "P-value for every estimate");
  add_input(pvalues, "Estimates CSV or fixture:<name>");
  add_method(pvalues);

  std::string pool_model = "dl";
  auto* pool = app.add_subcommand("pool", "Pooled estimate per group (log scale)");
  add_input(pool, "Estimates CSV or fixture:<name>");
  pool->add_option("--model", pool_model, "fixed | dl")->capture_default_str();
  pool->add_option("--group", common.group, "Restrict to one group");

  std::string plot_format = "svg";
  double plot_alpha = 0.05;
  bool no_color = false;
  auto* plot = app.add_subcommand("plot", "P-value plot with classification");
  add_input(plot, "Estimates CSV or fixture:<name>");
  add_method(plot);
  plot->add_option("--format", plot_format, "svg | ascii")->capture_default_str();
  plot->add_option("--alpha", plot_alpha, "Significance rule")->capture_default_str();
  plot->add_flag("--no-color", no_color, "Disable ANSI colour in ASCII output");

  auto* searchspace = app.add_subcommand("searchspace", "Analysis search space per study");
  add_input(searchspace, "Counts CSV or fixture:table3_counts");

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo p-values");
  simulate->add_option("--scenario", sim.scenario, "null | effect | phacked | mixture")
      ->capture_default_str();
  simulate->add_option("--n", sim.n, "Number of studies")->capture_default_str();
  simulate->add_option("--m", sim.m, "Tests per hacked study")->capture_default_str();
  simulate->add_option("--effect-z", sim.effect_z, "Mean z of the effect scenario")
      ->capture_default_str();
  simulate->add_option("--fraction", sim.fraction, "Hacked fraction of the mixture")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("-o,--out", sim.out, "Output file (default stdout)");

  AuditOptions audit;
  auto* auditcmd = app.add_subcommand("audit", "Full pipeline to a JSON report");
  auditcmd->add_option("estimates", audit.estimates, "Estimates CSVs or fixture:<name>");
  auditcmd->add_option("--counts", audit.counts, "Counts CSV or fixture:table3_counts");
  auditcmd->add_flag("--bundled", audit.bundled,
                     "Use the bundled air-quality fixtures for missing inputs");
  auditcmd->add_option("--method", audit.method, "linear | log | altman-bland")
      ->capture_default_str();
  auditcmd->add_option("--floor", audit.floor, "Report p <= floor as floor");
  auditcmd->add_option("--alpha", audit.alpha, "Classifier alpha")->capture_default_str();
  auditcmd->add_option("--out", audit.out, "Report path (default stdout)");
  auditcmd->add_option("--plots-dir", audit.plots_dir, "Write one plot per group here");
  auditcmd->add_option("--plot-format", audit.plot_format, "svg | ascii")
      ->capture_default_str();
  auditcmd->add_option("--dataset-id", audit.dataset_id, "Override the dataset id");

  std::string fx_action;
  std::string fx_name;
  std::string fx_out;
  auto* fixtures = app.add_subcommand("fixtures", "Bundled datasets");
  fixtures->add_option("action", fx_action, "list | verify | export")->required();
  fixtures->add_option("name", fx_name, "Fixture name for export");
  fixtures->add_option("-o,--out", fx_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*pvalues) return cmd_pvalues(common);
    if (*pool) return cmd_pool(common, pool_model);
    if (*plot) return cmd_plot(common, plot_format, plot_alpha, no_color);
    if (*searchspace) return cmd_searchspace(common);
    if (*simulate) {
      return cmd_simulate(sim);
    }
    if (*auditcmd) return cmd_audit(audit);
    if (*fixtures) return cmd_fixtures(fx_action, fx_name, fx_out);
  } catch (const ma::Error& e) {
    std::cerr << "metaaudit: " << ma::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "metaaudit: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
