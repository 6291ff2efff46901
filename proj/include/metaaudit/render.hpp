#pragma once

#include <string>

#include "metaaudit/pvalue_plot.hpp"

namespace metaaudit {

enum class PlotFormat { Svg, Ascii };

PlotFormat parse_plot_format(std::string_view text);

struct RenderOptions {
  double alpha = 0.05;
  bool color = true;   // ASCII only; METAAUDIT_NO_COLOR overrides
  std::string title;   // optional heading above the caption
};

/// SVG geometry, in pixels. Rank r maps to x = kLeft + r / n * kPlotWidth and
/// p maps to y = kTop + (1 - p) * kPlotHeight.
namespace svg_layout {
inline constexpr double kWidth = 640.0;
inline constexpr double kHeight = 440.0;
inline constexpr double kLeft = 72.0;
inline constexpr double kRight = 24.0;
inline constexpr double kTop = 48.0;
inline constexpr double kBottom = 72.0;
inline constexpr double kPlotWidth = kWidth - kLeft - kRight;
inline constexpr double kPlotHeight = kHeight - kTop - kBottom;
inline constexpr double kMarkerRadius = 4.0;

double x_of_rank(double rank, std::size_t n);
double y_of_p(double p);
}  // namespace svg_layout

/// ASCII grid size; every output is at least this large.
namespace ascii_layout {
inline constexpr int kRows = 20;
inline constexpr int kCols = 60;
}  // namespace ascii_layout

std::string render_plot(const PValuePlot& plot, const PlotClassification& classification,
                        PlotFormat format, const RenderOptions& options = {});

/// True unless METAAUDIT_NO_COLOR is set (to any value).
bool color_allowed_by_env();

}  // namespace metaaudit
