#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "wrcosim/csv.hpp"
#include "wrcosim/svg.hpp"

using namespace wrcosim;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("formats") {

TEST_CASE("numbers round-trip through text") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 6.02214076e23, 1.0 / 3.0})
    CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv table") {
  CsvTable t({"a", "b"});
  const double row[] = {1.5, -2.0};
  t.add_row(row);
  CHECK(t.str() == "a,b\n1.5,-2\n");
  CHECK(t.rows() == 1);
  const double short_row[] = {1.0};
  CHECK_THROWS_AS(t.add_row(short_row), std::invalid_argument);
}

TEST_CASE("svg line plot") {
  const std::vector<PlotSeries> series{{"one", {1, 2, 3}, {1, 4, 9}, false, true},
                                       {"two <&>", {1, 2, 3}, {2, 3, 4}, true, false}};
  const auto svg = render_svg(series, {"A & B", "x", "y"});
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(count(svg, "<circle") == 3);
  CHECK(svg.find("A &amp; B") != std::string::npos);
  CHECK(svg.find("two &lt;&amp;&gt;") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("log axes skip non-positive samples") {
  PlotOptions opt{"t", "H", "err"};
  opt.log_x = opt.log_y = true;
  const std::vector<PlotSeries> series{{"e", {0.5, 0.25, 0.0}, {1e-2, 0.0, 1e-3}, false, true}};
  const auto svg = render_svg(series, opt);
  CHECK(count(svg, "<circle") == 1);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(render_svg(std::vector<PlotSeries>{}, opt).find("</svg>") != std::string::npos);
}

}  // TEST_SUITE
