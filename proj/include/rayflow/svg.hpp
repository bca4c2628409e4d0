#pragma once

#include <string>
#include <vector>

namespace rayflow {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static SVG line plot: axes, ticks, one polyline per series, legend.
/// No external assets; long series are downsampled for file size.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

}  // namespace rayflow
