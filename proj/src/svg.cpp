#include "rayflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rayflow/errors.hpp"

namespace rayflow {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};
constexpr int kWidth = 720;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 140;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 48;
constexpr std::size_t kMaxPointsPerSeries = 1500;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (double x : s.x) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
    for (double y : s.y) {
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!(x_lo <= x_hi) || !(y_lo <= y_hi)) {
    x_lo = y_lo = 0.0;
    x_hi = y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_hi += 0.5;
    y_lo -= 0.5;
  }
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write plot file " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kMarginLeft << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"15\">" << title << "</text>\n";

  // axes
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
      << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int k = 0; k <= ticks; ++k) {
    const double fx = x_lo + (x_hi - x_lo) * k / ticks;
    const double gx = px(fx);
    out << "<line x1=\"" << fmt(gx) << "\" y1=\"" << kMarginTop + plot_h
        << "\" x2=\"" << fmt(gx) << "\" y2=\"" << kMarginTop + plot_h + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(gx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt(fx) << "</text>\n";
    const double fy = y_lo + (y_hi - y_lo) * k / ticks;
    const double gy = py(fy);
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(gy) << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << fmt(gy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(gy + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << fmt(fy) << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
      << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2 << ")\">"
      << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (n == 0) continue;
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPointsPerSeries);
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < n; k += stride)
      out << fmt(px(s.x[k])) << "," << fmt(py(s.y[k])) << " ";
    if ((n - 1) % stride != 0)
      out << fmt(px(s.x[n - 1])) << "," << fmt(py(s.y[n - 1]));
    out << "\"/>\n";

    const double ly = kMarginTop + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << kMarginLeft + plot_w + 10 << "\" y1=\"" << fmt(ly)
        << "\" x2=\"" << kMarginLeft + plot_w + 30 << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w + 34 << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace rayflow
