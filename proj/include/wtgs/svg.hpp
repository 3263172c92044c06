#pragma once

#include <string>
#include <vector>

namespace wtgs {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal self-contained SVG line chart: axes, tick labels, grid, legend.
// Deterministic output (no timestamps), suitable for byte-level comparison.
void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series);

}  // namespace wtgs
