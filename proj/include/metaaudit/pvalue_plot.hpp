#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace metaaudit {

struct PlotPoint {
  int rank = 0;  // 1-based
  double p = 0.0;
};

/// p-values sorted ascending against ranks 1..n. Built only by build_plot.
class PValuePlot {
 public:
  const std::vector<PlotPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::vector<double> pvalues() const;

 private:
  friend PValuePlot build_plot(std::span<const double> pvalues);
  std::vector<PlotPoint> points_;
};

/// Stable ascending sort; ties keep input order. Values must lie in (0, 1].
PValuePlot build_plot(std::span<const double> pvalues);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

/// Abscissa used by every fit: rank / (n + 1), so exact uniform quantiles
/// fall on the unit-slope line through the origin.
double plot_abscissa(int rank, std::size_t n);

/// OLS of p on rank / (n + 1). Requires n >= 2.
LineFit fit_single_line(const PValuePlot& plot);

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
};

/// Survival function of the limiting Kolmogorov distribution, P(K > lambda).
double kolmogorov_sf(double lambda);

/// Two-sided one-sample KS test against Uniform(0, 1), with the
/// (sqrt(n) + 0.12 + 0.11 / sqrt(n)) small-sample scaling.
KsResult ks_uniform_test(std::span<const double> values);

struct TwoSegmentFit {
  int breakpoint = 0;  // last rank of the left segment
  double sse_two = 0.0;
  LineFit left;
  LineFit right;
};

/// Exhaustive search over breakpoints 2..n-2; independent OLS on each side.
/// Ties go to the smaller breakpoint. Requires n >= 4.
TwoSegmentFit fit_two_segment(const PValuePlot& plot);

struct ClassifierConfig {
  double alpha = 0.05;
  double slope_lo = 0.8;
  double slope_hi = 1.2;
  double ks_alpha = 0.05;
  double effect_fraction = 0.5;
  std::size_t min_n_for_verdict = 4;
  double bilinear_gain = 0.5;

  void validate() const;
};

enum class PlotLabel { UniformNull, TrueEffect, BilinearMixture, Indeterminate };

std::string_view to_string(PlotLabel label) noexcept;
PlotLabel parse_plot_label(std::string_view text);

struct PlotClassification {
  PlotLabel label = PlotLabel::Indeterminate;
  double slope = 0.0;
  double intercept = 0.0;
  double ks_stat = 0.0;
  double ks_pvalue = 1.0;
  std::optional<int> breakpoint;  // set iff label == BilinearMixture
  double sse_one_segment = 0.0;
  double sse_two_segment = 0.0;
  double frac_below_alpha = 0.0;
};

PlotClassification classify(const PValuePlot& plot, const ClassifierConfig& config = {});

}  // namespace metaaudit
