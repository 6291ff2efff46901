#include "metaaudit/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "metaaudit/error.hpp"
#include "metaaudit/number_format.hpp"

namespace metaaudit {

namespace svg_layout {

double x_of_rank(double rank, std::size_t n) {
  return kLeft + rank / static_cast<double>(n) * kPlotWidth;
}

double y_of_p(double p) { return kTop + (1.0 - p) * kPlotHeight; }

}  // namespace svg_layout

PlotFormat parse_plot_format(std::string_view text) {
  if (text == "svg" || text == "SVG") return PlotFormat::Svg;
  if (text == "ascii" || text == "ASCII") return PlotFormat::Ascii;
  throw DomainError("unknown plot format '" + std::string(text) + "'");
}

bool color_allowed_by_env() { return std::getenv("METAAUDIT_NO_COLOR") == nullptr; }

namespace {

std::string px(double v) { return format_fixed(v, 2); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_svg(const PValuePlot& plot, const PlotClassification& cls,
                       const RenderOptions& opt) {
  using namespace svg_layout;
  const std::size_t n = plot.size();
  const double x0 = kLeft;
  const double x1 = kLeft + kPlotWidth;
  const double y0 = kTop + kPlotHeight;
  std::ostringstream s;

  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
    << px(kHeight) << "\" viewBox=\"0 0 " << px(kWidth) << ' ' << px(kHeight) << "\">\n";
  s << "<rect x=\"0.00\" y=\"0.00\" width=\"" << px(kWidth) << "\" height=\"" << px(kHeight)
    << "\" fill=\"#ffffff\"/>\n";
  if (!opt.title.empty()) {
    s << "<text class=\"title\" x=\"" << px(kWidth / 2) << "\" y=\"" << px(kTop / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(opt.title) << "</text>\n";
  }

  // Axes and ticks.
  s << "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n";
  s << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x1) << "\" y2=\""
    << px(y0) << "\"/>\n";
  s << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x0) << "\" y2=\""
    << px(kTop) << "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y_of_p(i * 0.25);
    s << "<line x1=\"" << px(x0 - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x0)
      << "\" y2=\"" << px(y) << "\"/>\n";
  }
  const std::size_t xticks = std::min<std::size_t>(n, 5);
  std::vector<std::size_t> xtick_ranks;
  for (std::size_t i = 0; i <= xticks; ++i) {
    xtick_ranks.push_back(xticks == 0 ? 0 : (n * i + xticks / 2) / xticks);
  }
  for (std::size_t r : xtick_ranks) {
    const double x = x_of_rank(static_cast<double>(r), n);
    s << "<line x1=\"" << px(x) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x) << "\" y2=\""
      << px(y0 + 5) << "\"/>\n";
  }
  s << "</g>\n";
  s << "<g class=\"tick-labels\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    s << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(y_of_p(i * 0.25) + 4)
      << "\" text-anchor=\"end\">" << format_fixed(i * 0.25, 2) << "</text>\n";
  }
  for (std::size_t r : xtick_ranks) {
    s << "<text x=\"" << px(x_of_rank(static_cast<double>(r), n)) << "\" y=\"" << px(y0 + 18)
      << "\" text-anchor=\"middle\">" << r << "</text>\n";
  }
  s << "</g>\n";

  // Uniform reference through (0, 0) and (n, n / (n + 1)).
  const double nd = static_cast<double>(n);
  s << "<line class=\"reference\" x1=\"" << px(x_of_rank(0, n)) << "\" y1=\"" << px(y_of_p(0))
    << "\" x2=\"" << px(x_of_rank(nd, n)) << "\" y2=\"" << px(y_of_p(nd / (nd + 1)))
    << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
  s << "<line class=\"alpha-rule\" x1=\"" << px(x0) << "\" y1=\"" << px(y_of_p(opt.alpha))
    << "\" x2=\"" << px(x1) << "\" y2=\"" << px(y_of_p(opt.alpha))
    << "\" stroke=\"#c0392b\" stroke-width=\"1\"/>\n";
  s << "<text class=\"alpha-label\" x=\"" << px(x1) << "\" y=\"" << px(y_of_p(opt.alpha) - 4)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#c0392b\">"
    << "alpha = " << format_sig6(opt.alpha) << "</text>\n";
  if (cls.breakpoint) {
    const double xb = x_of_rank(*cls.breakpoint + 0.5, n);
    s << "<line class=\"breakpoint\" x1=\"" << px(xb) << "\" y1=\"" << px(y0) << "\" x2=\""
      << px(xb) << "\" y2=\"" << px(kTop) << "\" stroke=\"#2471a3\" stroke-width=\"1\""
      << " stroke-dasharray=\"2 3\"/>\n";
  }

  s << "<g class=\"markers\" fill=\"#000000\">\n";
  for (const auto& pt : plot.points()) {
    s << "<circle cx=\"" << px(x_of_rank(pt.rank, n)) << "\" cy=\"" << px(y_of_p(pt.p))
      << "\" r=\"" << px(kMarkerRadius) << "\"/>\n";
  }
  s << "</g>\n";

  s << "<text class=\"axis-label\" x=\"" << px(kLeft + kPlotWidth / 2) << "\" y=\""
    << px(y0 + 38) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
    << "rank</text>\n";
  const double ly = kTop + kPlotHeight / 2;
  s << "<text class=\"axis-label\" x=\"18.00\" y=\"" << px(ly)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
    << " transform=\"rotate(-90 18.00 " << px(ly) << ")\">p-value</text>\n";
  s << "<text class=\"caption\" x=\"" << px(kWidth / 2) << "\" y=\"" << px(kHeight - 10)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\""
    << " font-weight=\"bold\">" << to_string(cls.label) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

const char* label_color(PlotLabel label) {
  switch (label) {
    case PlotLabel::UniformNull: return "\x1b[32m";
    case PlotLabel::TrueEffect: return "\x1b[34m";
    case PlotLabel::BilinearMixture: return "\x1b[33m";
    case PlotLabel::Indeterminate: return "\x1b[35m";
  }
  return "";
}

std::string render_ascii(const PValuePlot& plot, const PlotClassification& cls,
                         const RenderOptions& opt) {
  using namespace ascii_layout;
  const bool color = opt.color && color_allowed_by_env();
  const std::size_t n = plot.size();
  const double nd = static_cast<double>(n);
  auto row_of = [](double p) {
    return static_cast<int>(std::lround((1.0 - p) * (kRows - 1)));
  };
  auto col_of = [&](double rank) {
    return static_cast<int>(std::lround(rank / nd * (kCols - 1)));
  };

  std::vector<std::string> grid(kRows, std::string(kCols, ' '));
  for (int c = 0; c < kCols; ++c) {
    const double rank = c / static_cast<double>(kCols - 1) * nd;
    grid[row_of(rank / (nd + 1))][c] = '.';
  }
  const int alpha_row = row_of(opt.alpha);
  for (int c = 0; c < kCols; ++c) grid[alpha_row][c] = '-';
  for (const auto& pt : plot.points()) grid[row_of(pt.p)][col_of(pt.rank)] = 'o';

  const char* on = color ? label_color(cls.label) : "";
  const char* off = color ? "\x1b[0m" : "";
  std::ostringstream s;
  if (!opt.title.empty()) s << opt.title << '\n';
  s << "p-value\n";
  for (int r = 0; r < kRows; ++r) {
    std::string tag = "       ";
    if (r == 0) tag = "  1.00 ";
    if (r == kRows - 1) tag = "  0.00 ";
    if (r == alpha_row) tag = "  " + format_fixed(opt.alpha, 2) + ' ';
    s << tag << '|';
    for (char ch : grid[r]) {
      if (ch == 'o' && color) {
        s << on << 'o' << off;
      } else {
        s << ch;
      }
    }
    s << '\n';
  }
  s << "       +" << std::string(kCols, '-') << '\n';
  const std::string last = std::to_string(n);
  s << "       0" << std::string(kCols - last.size(), ' ') << last << '\n';
  s << std::string(7 + kCols / 2 - 2, ' ') << "rank\n";
  s << "[" << on << to_string(cls.label) << off << "]\n";
  return s.str();
}

}  // namespace

std::string render_plot(const PValuePlot& plot, const PlotClassification& classification,
                        PlotFormat format, const RenderOptions& options) {
  if (plot.size() == 0) throw InsufficientDataError("cannot render an empty plot");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1)");
  }
  return format == PlotFormat::Svg ? render_svg(plot, classification, options)
                                   : render_ascii(plot, classification, options);
}

}  // namespace metaaudit
