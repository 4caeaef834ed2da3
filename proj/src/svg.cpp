#include "wrcosim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wrcosim/csv.hpp"

namespace wrcosim {

namespace {

constexpr const char* kPalette[] = {"#000000", "#cc6677", "#117733", "#882255",
                                    "#332288", "#ddcc77", "#44aa99", "#aa4499"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }

  void fit(double mn, double mx) {
    if (!(mn <= mx)) {
      mn = log ? 1.0 : 0.0;
      mx = log ? 10.0 : 1.0;
    }
    lo = map(mn);
    hi = map(mx);
    if (log) {
      lo = std::floor(lo);
      hi = std::ceil(hi);
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double d = lo; d <= hi + 1e-9; d += 1.0) out.push_back(std::pow(10.0, d));
    } else {
      for (int k = 0; k <= 5; ++k) out.push_back(lo + (hi - lo) * k / 5.0);
    }
    return out;
  }
};

}  // namespace

std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& options) {
  const double left = 70, right = 150, top = 40, bottom = 55;
  const double w = options.width, h = options.height;
  const double pw = w - left - right, ph = h - top - bottom;

  Axis ax{options.log_x}, ay{options.log_y};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if ((ax.log && s.x[k] <= 0) || (ay.log && s.y[k] <= 0)) continue;
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  }
  ax.fit(xmin, xmax);
  ay.fit(ymin, ymax);
  auto px = [&](double x) { return left + (ax.map(x) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return top + ph - (ay.map(y) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(options.title) << "</text>\n"
      << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(top + ph + 5) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left)
        << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(h - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(options.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << num(top + ph / 2) << ")\">" << escape(options.y_label)
      << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k) {
      if ((ax.log && ser.x[k] <= 0) || (ay.log && ser.y[k] <= 0)) continue;
      if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) continue;
      if (!points.empty()) points += ' ';
      points += num(px(ser.x[k])) + ',' + num(py(ser.y[k]));
      if (ser.markers)
        out << "<circle cx=\"" << num(px(ser.x[k])) << "\" cy=\"" << num(py(ser.y[k]))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << points << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(s);
    out << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(left + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"" << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
        << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4)
        << "\" font-size=\"12\">" << escape(ser.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace wrcosim
