#include "adr/plot.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "adr/util.hpp"

namespace adr {

namespace {

// Shared chart geometry (SVG user units).
constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 60.0;
constexpr double kPlotWidth = kWidth - kMarginLeft - kMarginRight;    // 710
constexpr double kPlotHeight = kHeight - kMarginTop - kMarginBottom;  // 380

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2.0
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape_xml(title) << "</text>\n";
}

void draw_axes(std::ostringstream& svg, const std::string& x_label,
               const std::string& y_label) {
  const double x0 = kMarginLeft;
  const double y0 = kMarginTop + kPlotHeight;
  svg << "<line x1=\"" << x0 << "\" y1=\"" << kMarginTop << "\" x2=\"" << x0
      << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\""
      << kMarginLeft + kPlotWidth << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kMarginLeft + kPlotWidth / 2.0 << "\" y=\""
      << kHeight - 12.0
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kMarginTop + kPlotHeight / 2.0
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << kMarginTop + kPlotHeight / 2.0 << ")\">" << escape_xml(y_label)
      << "</text>\n";
}

}  // namespace

std::vector<double> exp_smooth(std::span<const double> values, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("exp_smooth: alpha must lie in [0, 1]");
  }
  std::vector<double> smoothed;
  smoothed.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    smoothed.push_back(i == 0 ? values[0]
                              : alpha * smoothed.back() + (1.0 - alpha) * values[i]);
  }
  return smoothed;
}

std::string line_chart_svg(std::span<const double> xs, std::span<const double> ys,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("line_chart_svg: xs and ys differ in length");
  }
  if (xs.empty()) {
    throw std::invalid_argument("line_chart_svg: nothing to plot");
  }
  const double x_min = *std::min_element(xs.begin(), xs.end());
  const double x_max = *std::max_element(xs.begin(), xs.end());
  const double y_min = *std::min_element(ys.begin(), ys.end());
  const double y_max = *std::max_element(ys.begin(), ys.end());

  const auto map_x = [&](double x) {
    if (x_max == x_min) return kMarginLeft + kPlotWidth / 2.0;
    return kMarginLeft + (x - x_min) / (x_max - x_min) * kPlotWidth;
  };
  const auto map_y = [&](double y) {
    if (y_max == y_min) return kMarginTop + kPlotHeight / 2.0;
    return kMarginTop + kPlotHeight - (y - y_min) / (y_max - y_min) * kPlotHeight;
  };

  std::ostringstream svg;
  open_svg(svg, title);
  draw_axes(svg, x_label, y_label);

  // Range labels at the axis extremes.
  svg << "<text x=\"" << kMarginLeft << "\" y=\"" << kMarginTop + kPlotHeight + 18.0
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(x_min) << "</text>\n";
  svg << "<text x=\"" << kMarginLeft + kPlotWidth << "\" y=\""
      << kMarginTop + kPlotHeight + 18.0
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(x_max) << "</text>\n";
  svg << "<text x=\"" << kMarginLeft - 6.0 << "\" y=\"" << kMarginTop + 4.0
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(y_max) << "</text>\n";
  svg << "<text x=\"" << kMarginLeft - 6.0 << "\" y=\""
      << kMarginTop + kPlotHeight + 4.0
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(y_min) << "</text>\n";

  svg << "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) svg << ' ';
    svg << format_double(map_x(xs[i])) << ',' << format_double(map_y(ys[i]));
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

std::string bar_chart_svg(const std::vector<std::pair<std::string, double>>& bars,
                          const std::string& title, const std::string& y_label) {
  if (bars.empty()) {
    throw std::invalid_argument("bar_chart_svg: nothing to plot");
  }
  double max_value = 0.0;
  for (const auto& [label, value] : bars) {
    if (value < 0.0) {
      throw std::invalid_argument("bar_chart_svg: negative value for '" + label +
                                  "'");
    }
    max_value = std::max(max_value, value);
  }

  std::ostringstream svg;
  open_svg(svg, title);
  draw_axes(svg, "", y_label);
  svg << "<text x=\"" << kMarginLeft - 6.0 << "\" y=\"" << kMarginTop + 4.0
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(max_value) << "</text>\n";

  const double slot = kPlotWidth / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double height =
        max_value == 0.0 ? 0.0 : bars[i].second / max_value * kPlotHeight;
    const double x = kMarginLeft + slot * (static_cast<double>(i) + 0.2);
    const double y = kMarginTop + kPlotHeight - height;
    svg << "<rect x=\"" << format_double(x) << "\" y=\"" << format_double(y)
        << "\" width=\"" << format_double(slot * 0.6) << "\" height=\""
        << format_double(height) << "\" fill=\"#1f6fb4\"/>\n";
    svg << "<text x=\"" << format_double(x + slot * 0.3) << "\" y=\""
        << format_double(y - 6.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_double(bars[i].second) << "</text>\n";
    svg << "<text x=\"" << format_double(x + slot * 0.3) << "\" y=\""
        << kMarginTop + kPlotHeight + 18.0
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape_xml(bars[i].first) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace adr
