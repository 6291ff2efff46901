#include <cstdlib>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "metaaudit/error.hpp"
#include "metaaudit/fixtures.hpp"
#include "metaaudit/render.hpp"

namespace ma = metaaudit;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

ma::PValuePlot no2_plot() {
  std::vector<double> p;
  for (const auto& fp : ma::fixture_pvalues(ma::FixtureId::Table5No2)) p.push_back(fp.result.p);
  return ma::build_plot(p);
}

struct Line {
  double x1, y1, x2, y2;
};

Line find_line(const std::string& svg, const std::string& cls) {
  const std::regex re("<line class=\"" + cls +
                      "\" x1=\"([-0-9.]+)\" y1=\"([-0-9.]+)\" x2=\"([-0-9.]+)\" "
                      "y2=\"([-0-9.]+)\"[^>]*>");
  std::smatch m;
  if (!std::regex_search(svg, m, re)) return {0, 0, 0, 0};
  return {std::stod(m[1]), std::stod(m[2]), std::stod(m[3]), std::stod(m[4])};
}

}  // namespace

TEST(RenderSvg, No2PlotHasAllElements) {
  const auto plot = no2_plot();
  const auto cls = ma::classify(plot);
  const std::string svg = ma::render_plot(plot, cls, ma::PlotFormat::Svg);
  EXPECT_EQ(count_of(svg, "<circle"), 13u);
  EXPECT_NE(svg.find(">BilinearMixture</text>"), std::string::npos);
  EXPECT_NE(svg.find(">rank</text>"), std::string::npos);
  EXPECT_NE(svg.find(">p-value</text>"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray=\"6 4\""), std::string::npos);

  namespace L = ma::svg_layout;
  const Line ref = find_line(svg, "reference");
  EXPECT_NEAR(ref.x1, L::kLeft, 0.005);
  EXPECT_NEAR(ref.y1, L::kTop + L::kPlotHeight, 0.005);
  EXPECT_NEAR(ref.x2, L::kLeft + L::kPlotWidth, 0.005);
  EXPECT_NEAR(ref.y2, L::y_of_p(13.0 / 14.0), 0.005);

  const Line rule = find_line(svg, "alpha-rule");
  EXPECT_NEAR(rule.y1, L::y_of_p(0.05), 0.005);
  EXPECT_EQ(rule.y1, rule.y2);
}

TEST(RenderSvg, SinglePointIndeterminate) {
  const auto plot = ma::build_plot(std::vector<double>{0.2});
  const auto cls = ma::classify(plot);
  const std::string svg = ma::render_plot(plot, cls, ma::PlotFormat::Svg);
  EXPECT_EQ(count_of(svg, "<circle"), 1u);
  EXPECT_NE(svg.find(">Indeterminate</text>"), std::string::npos);
}

TEST(RenderSvg, UniformQuantilesSitOnReferenceLine) {
  const int n = 20;
  std::vector<double> p;
  for (int i = 1; i <= n; ++i) p.push_back(static_cast<double>(i) / (n + 1));
  const auto plot = ma::build_plot(p);
  const std::string svg = ma::render_plot(plot, ma::classify(plot), ma::PlotFormat::Svg);
  const Line ref = find_line(svg, "reference");
  const std::regex circle("<circle cx=\"([0-9.]+)\" cy=\"([0-9.]+)\" r=\"([0-9.]+)\"");
  int markers = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle);
       it != std::sregex_iterator(); ++it) {
    const double cx = std::stod((*it)[1]);
    const double cy = std::stod((*it)[2]);
    const double r = std::stod((*it)[3]);
    const double y_line = ref.y1 + (cx - ref.x1) / (ref.x2 - ref.x1) * (ref.y2 - ref.y1);
    EXPECT_LT(std::abs(cy - y_line), r);
    ++markers;
  }
  EXPECT_EQ(markers, n);
}

TEST(RenderSvg, DeterministicBytes) {
  const auto plot = no2_plot();
  const auto cls = ma::classify(plot);
  ma::RenderOptions opt;
  opt.title = "NO2";
  EXPECT_EQ(ma::render_plot(plot, cls, ma::PlotFormat::Svg, opt),
            ma::render_plot(plot, cls, ma::PlotFormat::Svg, opt));
}

TEST(RenderSvg, EscapesTitle) {
  const auto plot = ma::build_plot(std::vector<double>{0.2, 0.4});
  ma::RenderOptions opt;
  opt.title = "a<b & c";
  const auto svg = ma::render_plot(plot, ma::classify(plot), ma::PlotFormat::Svg, opt);
  EXPECT_NE(svg.find("a&lt;b &amp; c"), std::string::npos);
}

TEST(RenderAscii, GridAndElements) {
  ::setenv("METAAUDIT_NO_COLOR", "1", 1);
  const auto plot = no2_plot();
  const auto cls = ma::classify(plot);
  const std::string txt = ma::render_plot(plot, cls, ma::PlotFormat::Ascii);
  ::unsetenv("METAAUDIT_NO_COLOR");
  EXPECT_EQ(txt.find('\x1b'), std::string::npos);

  std::istringstream in(txt);
  std::string line;
  int grid_rows = 0;
  std::size_t widest = 0;
  while (std::getline(in, line)) {
    const auto bar = line.find('|');
    if (bar == std::string::npos) continue;
    ++grid_rows;
    widest = std::max(widest, line.size() - bar - 1);
  }
  EXPECT_GE(grid_rows, 20);
  EXPECT_GE(widest, 60u);
  EXPECT_NE(txt.find('o'), std::string::npos);
  EXPECT_NE(txt.find("  0.05 |---"), std::string::npos);
  EXPECT_NE(txt.find("..."), std::string::npos);
  EXPECT_NE(txt.find("rank"), std::string::npos);
  EXPECT_NE(txt.find("p-value"), std::string::npos);
  EXPECT_NE(txt.find("[BilinearMixture]"), std::string::npos);
}

TEST(RenderAscii, ColourByDefault) {
  ::unsetenv("METAAUDIT_NO_COLOR");
  const auto plot = no2_plot();
  const std::string txt = ma::render_plot(plot, ma::classify(plot), ma::PlotFormat::Ascii);
  EXPECT_NE(txt.find("\x1b["), std::string::npos);
  ma::RenderOptions plain;
  plain.color = false;
  EXPECT_EQ(ma::render_plot(plot, ma::classify(plot), ma::PlotFormat::Ascii, plain).find('\x1b'),
            std::string::npos);
}

TEST(RenderPlot, RejectsBadAlpha) {
  const auto plot = ma::build_plot(std::vector<double>{0.2});
  ma::RenderOptions opt;
  opt.alpha = 1.5;
  EXPECT_THROW(ma::render_plot(plot, ma::classify(plot), ma::PlotFormat::Svg, opt),
               ma::DomainError);
  EXPECT_THROW(ma::parse_plot_format("png"), ma::DomainError);
}
