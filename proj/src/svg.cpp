#include "wtgs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "wtgs/errors.hpp"

namespace wtgs {

namespace {

constexpr int kW = 900, kH = 520;
constexpr int kLeft = 70, kRight = 160, kTop = 50, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Tick spacing from the 1-2-5 ladder.
double nice_step(double span, int target_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double x : s.x) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
    for (double y : s.y) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
  }
  if (!(ymin <= ymax)) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymax = ymin + (ymin == 0 ? 1 : std::abs(ymin) * 0.1);
    ymin -= (ymin == 0 ? 0 : std::abs(ymin) * 0.1);
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  f << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  f << "<text x=\"" << kW / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"17\">" << title << "</text>\n";

  // Grid and ticks.
  const double xstep = nice_step(xmax - xmin, 8), ystep = nice_step(ymax - ymin, 6);
  f << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-9 * xstep; x += xstep) {
    f << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << kTop << "\" x2=\"" << fmt(px(x))
      << "\" y2=\"" << kTop + ph << "\" stroke=\"#e0e0e0\"/>\n";
    f << "<text x=\"" << fmt(px(x)) << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-9 * ystep; y += ystep) {
    f << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << kLeft + pw
      << "\" y2=\"" << fmt(py(y)) << "\" stroke=\"#e0e0e0\"/>\n";
    f << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py(y) + 4)
      << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  f << "</g>\n";

  // Axes.
  f << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << fmt(pw)
    << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  f << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
    << "</text>\n";
  f << "<text x=\"18\" y=\"" << kTop + ph / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
    << " transform=\"rotate(-90 18 " << kTop + ph / 2 << ")\">" << ylabel << "</text>\n";

  // Series.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      f << fmt(px(series[s].x[k])) << "," << fmt(py(series[s].y[k]));
      if (k + 1 < series[s].x.size()) f << " ";
    }
    f << "\"/>\n";
  }

  // Legend.
  f << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const int ly = kTop + 10 + static_cast<int>(s) * 18;
    f << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
      << kLeft + pw + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    f << "<text x=\"" << kLeft + pw + 40 << "\" y=\"" << ly + 4 << "\">" << series[s].label
      << "</text>\n";
  }
  f << "</g>\n</svg>\n";
}

}  // namespace wtgs
