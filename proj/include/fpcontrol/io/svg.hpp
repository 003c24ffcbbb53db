#pragma once

// Estimates-with-error-bars scatter in the layout of a raw/shrunken panel
// grid: one panel per table, effects along x, estimate on y.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "fpcontrol/errors.hpp"

namespace fpc::io {

struct PlotPoint {
  double estimate;
  double lo;
  double hi;
};

struct PlotPanel {
  std::string title;
  std::vector<PlotPoint> points;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Panels are laid out two per row and share one y range so raw and
/// shrunken estimates are directly comparable.
inline void write_panels_svg(std::ostream& out, const std::vector<PlotPanel>& panels) {
  if (panels.empty()) throw InputError("plot: no panels");
  double ymin = 0.0, ymax = 0.0;
  for (const auto& p : panels) {
    if (p.points.empty()) throw InputError("plot: panel '" + p.title + "' has no effects");
    for (const auto& pt : p.points) {
      ymin = std::min({ymin, pt.lo, pt.estimate});
      ymax = std::max({ymax, pt.hi, pt.estimate});
    }
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  constexpr double pw = 420, ph = 300, margin = 50;
  const std::size_t cols = std::min<std::size_t>(2, panels.size());
  const std::size_t rows = (panels.size() + 1) / 2;
  const double width = cols * pw;
  const double height = rows * ph;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::num(width)
      << "\" height=\"" << detail::num(height) << "\" viewBox=\"0 0 " << detail::num(width) << ' '
      << detail::num(height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << detail::num(width) << "\" height=\"" << detail::num(height)
      << "\" fill=\"white\"/>\n";

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& panel = panels[k];
    const double ox = (k % 2) * pw;
    const double oy = (k / 2) * ph;
    const double x0 = ox + margin, x1 = ox + pw - 15;
    const double y0 = oy + 30, y1 = oy + ph - margin;
    const std::size_t n = panel.points.size();
    auto sx = [&](std::size_t i) { return x0 + (x1 - x0) * (static_cast<double>(i) + 0.5) / static_cast<double>(n); };
    auto sy = [&](double v) { return y1 - (y1 - y0) * (v - ymin) / (ymax - ymin); };

    out << "<g class=\"panel\" id=\"panel-" << static_cast<char>('A' + k) << "\">\n";
    out << "<text x=\"" << detail::num(ox + 10) << "\" y=\"" << detail::num(oy + 20)
        << "\" font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\">" << static_cast<char>('A' + k)
        << "  " << detail::escape_xml(panel.title) << "</text>\n";
    out << "<rect x=\"" << detail::num(x0) << "\" y=\"" << detail::num(y0) << "\" width=\"" << detail::num(x1 - x0)
        << "\" height=\"" << detail::num(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<line class=\"zero\" x1=\"" << detail::num(x0) << "\" y1=\"" << detail::num(sy(0.0)) << "\" x2=\""
        << detail::num(x1) << "\" y2=\"" << detail::num(sy(0.0)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (double tick : {ymin + pad, 0.0, ymax - pad}) {
      out << "<text x=\"" << detail::num(x0 - 5) << "\" y=\"" << detail::num(sy(tick) + 4)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << detail::num(tick) << "</text>\n";
    }
    out << "<text x=\"" << detail::num(0.5 * (x0 + x1)) << "\" y=\"" << detail::num(y1 + 30)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">effect</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pt = panel.points[i];
      out << "<line class=\"errbar\" x1=\"" << detail::num(sx(i)) << "\" y1=\"" << detail::num(sy(pt.lo)) << "\" x2=\""
          << detail::num(sx(i)) << "\" y2=\"" << detail::num(sy(pt.hi)) << "\" stroke=\"steelblue\"/>\n";
      out << "<circle class=\"marker\" cx=\"" << detail::num(sx(i)) << "\" cy=\"" << detail::num(sy(pt.estimate))
          << "\" r=\"2.5\" fill=\"black\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace fpc::io
