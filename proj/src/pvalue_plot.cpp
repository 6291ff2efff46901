#include "metaaudit/pvalue_plot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "metaaudit/effect_stats.hpp"
#include "metaaudit/error.hpp"

namespace metaaudit {

namespace {

// OLS over points [first, last) of the plot, abscissa on the full-plot scale.
LineFit fit_range(const std::vector<PlotPoint>& pts, std::size_t first,
                  std::size_t last, std::size_t n) {
  const double m = static_cast<double>(last - first);
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    mean_x += plot_abscissa(pts[i].rank, n);
    mean_y += pts[i].p;
  }
  mean_x /= m;
  mean_y /= m;

  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double dx = plot_abscissa(pts[i].rank, n) - mean_x;
    sxx += dx * dx;
    sxy += dx * (pts[i].p - mean_y);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (std::size_t i = first; i < last; ++i) {
    const double r =
        pts[i].p - (fit.intercept + fit.slope * plot_abscissa(pts[i].rank, n));
    fit.sse += r * r;
  }
  return fit;
}

}  // namespace

std::vector<double> PValuePlot::pvalues() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& pt : points_) out.push_back(pt.p);
  return out;
}

PValuePlot build_plot(std::span<const double> pvalues) {
  if (pvalues.empty()) throw DomainError("build_plot: no p-values");
  for (double p : pvalues) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("build_plot: p-value " + std::to_string(p) +
                        " outside (0, 1]");
    }
  }
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::stable_sort(sorted.begin(), sorted.end());

  PValuePlot plot;
  plot.points_.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    plot.points_.push_back({static_cast<int>(i + 1), sorted[i]});
  }
  return plot;
}

double plot_abscissa(int rank, std::size_t n) {
  return static_cast<double>(rank) / static_cast<double>(n + 1);
}

LineFit fit_single_line(const PValuePlot& plot) {
  if (plot.size() < 2) {
    throw InsufficientDataError("single-line fit needs at least 2 points");
  }
  return fit_range(plot.points(), 0, plot.size(), plot.size());
}

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    const double k = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double odd = 2.0 * j - 1.0;
      const double term = std::exp(-odd * odd * k);
      sum += term;
      if (term < 1e-18) break;
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_uniform_test(std::span<const double> values) {
  if (values.empty()) throw DomainError("ks_uniform_test: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  KsResult out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - sorted[i];
    const double below = sorted[i] - static_cast<double>(i) / n;
    out.d_stat = std::max({out.d_stat, above, below});
  }
  const double root_n = std::sqrt(n);
  const double lambda = (root_n + 0.12 + 0.11 / root_n) * out.d_stat;
  out.p_value = std::max(kolmogorov_sf(lambda), kMinReportedP);
  return out;
}

TwoSegmentFit fit_two_segment(const PValuePlot& plot) {
  const std::size_t n = plot.size();
  if (n < 4) throw InsufficientDataError("two-segment fit needs at least 4 points");
  const auto& pts = plot.points();

  TwoSegmentFit best;
  bool have = false;
  for (std::size_t b = 2; b + 2 <= n; ++b) {
    const LineFit left = fit_range(pts, 0, b, n);
    const LineFit right = fit_range(pts, b, n, n);
    const double total = left.sse + right.sse;
    if (!have || total < best.sse_two) {
      best = {static_cast<int>(b), total, left, right};
      have = true;
    }
  }
  return best;
}

void ClassifierConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(slope_lo < slope_hi)) throw DomainError("slope band must satisfy lo < hi");
  if (!(ks_alpha > 0.0 && ks_alpha < 1.0)) {
    throw DomainError("ks_alpha must lie in (0, 1)");
  }
  if (!(effect_fraction >= 0.0 && effect_fraction <= 1.0)) {
    throw DomainError("effect_fraction must lie in [0, 1]");
  }
  if (!(bilinear_gain > 0.0 && bilinear_gain < 1.0)) {
    throw DomainError("bilinear_gain must lie in (0, 1)");
  }
}

std::string_view to_string(PlotLabel label) noexcept {
  switch (label) {
    case PlotLabel::UniformNull: return "UniformNull";
    case PlotLabel::TrueEffect: return "TrueEffect";
    case PlotLabel::BilinearMixture: return "BilinearMixture";
    case PlotLabel::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

PlotLabel parse_plot_label(std::string_view text) {
  for (PlotLabel l : {PlotLabel::UniformNull, PlotLabel::TrueEffect,
                      PlotLabel::BilinearMixture, PlotLabel::Indeterminate}) {
    if (text == to_string(l)) return l;
  }
  throw DomainError("unknown plot label '" + std::string(text) + "'");
}

PlotClassification classify(const PValuePlot& plot, const ClassifierConfig& config) {
  config.validate();
  const std::size_t n = plot.size();
  const std::vector<double> p = plot.pvalues();

  PlotClassification out;
  const auto below = std::count_if(p.begin(), p.end(),
                                   [&](double v) { return v <= config.alpha; });
  out.frac_below_alpha = static_cast<double>(below) / static_cast<double>(n);

  const KsResult ks = ks_uniform_test(p);
  out.ks_stat = ks.d_stat;
  out.ks_pvalue = ks.p_value;

  if (n >= 2) {
    const LineFit line = fit_single_line(plot);
    out.slope = line.slope;
    out.intercept = line.intercept;
    out.sse_one_segment = line.sse;
  } else {
    // A lone point: flat line through it.
    out.intercept = p.front();
  }

  std::optional<TwoSegmentFit> two;
  if (n >= 4) {
    two = fit_two_segment(plot);
    out.sse_two_segment = two->sse_two;
  } else {
    out.sse_two_segment = out.sse_one_segment;
  }

  if (n < config.min_n_for_verdict) {
    out.label = PlotLabel::Indeterminate;
    return out;
  }
  if (out.frac_below_alpha >= config.effect_fraction && out.slope < config.slope_lo) {
    out.label = PlotLabel::TrueEffect;
    return out;
  }
  if (out.ks_pvalue >= config.ks_alpha && out.slope >= config.slope_lo &&
      out.slope <= config.slope_hi) {
    out.label = PlotLabel::UniformNull;
    return out;
  }
  if (two && two->sse_two <= (1.0 - config.bilinear_gain) * out.sse_one_segment) {
    const auto split = p.begin() + two->breakpoint;
    double left_mean = 0.0;
    for (auto it = p.begin(); it != split; ++it) left_mean += *it;
    left_mean /= static_cast<double>(two->breakpoint);

    const double right_min = *split;
    const double right_max = p.back();
    bool right_uniform = false;
    if (right_max > right_min) {
      std::vector<double> rescaled;
      for (auto it = split; it != p.end(); ++it) {
        rescaled.push_back((*it - right_min) / (right_max - right_min));
      }
      right_uniform = ks_uniform_test(rescaled).p_value >= config.ks_alpha;
    }
    if (left_mean <= config.alpha && right_uniform) {
      out.label = PlotLabel::BilinearMixture;
      out.breakpoint = two->breakpoint;
      return out;
    }
  }
  out.label = PlotLabel::Indeterminate;
  return out;
}

}  // namespace metaaudit
