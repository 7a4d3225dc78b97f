#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adr {

/// Exponential smoothing: s_0 = x_0, s_t = alpha*s_{t-1} + (1-alpha)*x_t.
/// alpha must lie in [0, 1]; an empty input gives an empty output.
std::vector<double> exp_smooth(std::span<const double> values, double alpha);

/// Standalone SVG line chart over (xs[i], ys[i]) points. Degenerate ranges
/// (all-equal x or y) are drawn centered along that axis, so a constant
/// series renders as a flat line.
std::string line_chart_svg(std::span<const double> xs, std::span<const double> ys,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label);

/// Standalone SVG bar chart for labeled non-negative values; bar heights are
/// proportional to value / max(values).
std::string bar_chart_svg(const std::vector<std::pair<std::string, double>>& bars,
                          const std::string& title, const std::string& y_label);

}  // namespace adr
