#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "adr/plot.hpp"

using namespace adr;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

int count_occurrences(const std::string& haystack, const std::string& needle) {
  int count = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    count += 1;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("exp_smooth follows the recurrence exactly") {
  const std::vector<double> values = {1.0, 2.0, 3.0};
  const std::vector<double> smoothed = exp_smooth(values, 0.5);
  REQUIRE(smoothed.size() == 3);
  CHECK(smoothed[0] == 1.0);
  CHECK(smoothed[1] == 1.5);
  CHECK(smoothed[2] == 2.25);

  // Heavy smoothing barely moves off the start.
  const std::vector<double> step = {0.0, 1.0};
  const std::vector<double> heavy = exp_smooth(step, 0.99);
  CHECK(heavy[0] == 0.0);
  CHECK(heavy[1] == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("exp_smooth endpoints of the alpha range") {
  const std::vector<double> values = {4.0, -1.0, 7.5, 0.25};

  // alpha = 0: no memory, output equals input.
  CHECK(exp_smooth(values, 0.0) == values);

  // alpha = 1: frozen at the first value.
  const std::vector<double> frozen = exp_smooth(values, 1.0);
  for (double s : frozen) CHECK(s == 4.0);

  // A constant series is a fixed point for every alpha.
  const std::vector<double> flat = {2.5, 2.5, 2.5, 2.5};
  CHECK(exp_smooth(flat, 0.37) == flat);
}

TEST_CASE("exp_smooth rejects alpha outside [0, 1] and handles empty input") {
  const std::vector<double> values = {1.0};
  CHECK_THROWS_AS(exp_smooth(values, -0.01), std::invalid_argument);
  CHECK_THROWS_AS(exp_smooth(values, 1.01), std::invalid_argument);
  CHECK_THROWS_AS(exp_smooth(values, std::nan("")), std::invalid_argument);
  CHECK(exp_smooth(std::vector<double>{}, 0.5).empty());
}

TEST_CASE("line chart maps data to plot coordinates") {
  const std::vector<double> xs = {0.0, 1.0, 2.0};
  const std::vector<double> ys = {0.0, 10.0, 5.0};
  const std::string svg = line_chart_svg(xs, ys, "t", "x", "y");

  // Plot area is x in [70, 780], y in [40, 420]; y grows downward, so the
  // max lands on 40 and the midpoint value on 230.
  CHECK(contains(svg, "points=\"70,420 425,40 780,230\""));
  CHECK(contains(svg, "<svg xmlns=\"http://www.w3.org/2000/svg\""));
  CHECK(contains(svg, "</svg>"));

  // Axis range labels.
  CHECK(contains(svg, ">0</text>"));
  CHECK(contains(svg, ">10</text>"));
  CHECK(contains(svg, ">2</text>"));
}

TEST_CASE("line chart renders a constant series as a flat centered line") {
  const std::vector<double> xs = {0.0, 1.0, 2.0};
  const std::vector<double> ys = {3.0, 3.0, 3.0};
  const std::string svg = line_chart_svg(xs, ys, "flat", "x", "y");
  CHECK(contains(svg, "points=\"70,230 425,230 780,230\""));

  // A single point degenerates on both axes: centered at (425, 230).
  const std::vector<double> one = {5.0};
  const std::string dot = line_chart_svg(one, one, "dot", "x", "y");
  CHECK(contains(dot, "points=\"425,230\""));
}

TEST_CASE("line chart rejects mismatched or empty series") {
  const std::vector<double> xs = {0.0, 1.0};
  const std::vector<double> ys = {0.0};
  CHECK_THROWS_AS(line_chart_svg(xs, ys, "t", "x", "y"), std::invalid_argument);
  CHECK_THROWS_AS(line_chart_svg(std::vector<double>{}, std::vector<double>{}, "t",
                                 "x", "y"),
                  std::invalid_argument);
}

TEST_CASE("bar chart heights are proportional to values") {
  const std::vector<std::pair<std::string, double>> bars = {{"a", 10.0},
                                                            {"b", 20.0}};
  const std::string svg = bar_chart_svg(bars, "t", "y");

  // Two slots of 355 units; bars start 20% in, span 60%, and the tallest
  // bar fills the full 380-unit plot height.
  CHECK(contains(svg, "<rect x=\"141\" y=\"230\" width=\"213\" height=\"190\""));
  CHECK(contains(svg, "<rect x=\"496\" y=\"40\" width=\"213\" height=\"380\""));
  CHECK(count_occurrences(svg, "<rect") == 3);  // background + two bars
  CHECK(contains(svg, ">a</text>"));
  CHECK(contains(svg, ">b</text>"));
  CHECK(contains(svg, ">10</text>"));
  CHECK(contains(svg, ">20</text>"));
}

TEST_CASE("bar chart zero maximum draws zero-height bars") {
  const std::vector<std::pair<std::string, double>> bars = {{"z", 0.0}};
  const std::string svg = bar_chart_svg(bars, "t", "y");
  CHECK(contains(svg, "height=\"0\""));
  CHECK(contains(svg, "y=\"420\""));
}

TEST_CASE("bar chart rejects negative values and empty input") {
  CHECK_THROWS_AS(bar_chart_svg({{"n", -1.0}}, "t", "y"), std::invalid_argument);
  CHECK_THROWS_AS(bar_chart_svg({}, "t", "y"), std::invalid_argument);
}

TEST_CASE("chart text is XML-escaped") {
  const std::vector<std::pair<std::string, double>> bars = {{"a<b&\"c\"", 1.0}};
  const std::string svg = bar_chart_svg(bars, "x > y", "u & v");
  CHECK(contains(svg, "a&lt;b&amp;&quot;c&quot;"));
  CHECK(contains(svg, "x &gt; y"));
  CHECK(contains(svg, "u &amp; v"));
  CHECK(!contains(svg, "a<b"));
}
