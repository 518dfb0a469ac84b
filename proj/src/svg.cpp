#include "spinmz/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spinmz/errors.hpp"

namespace spinmz::svg {

namespace {

constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// tick label: enough digits to tell neighbors apart, no locale surprises
std::string tick_label(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range pad_range(double lo, double hi, bool log_scale) {
  if (log_scale) {
    double f = std::pow(hi / lo, 0.05);
    return {lo / f, hi * f};
  }
  if (lo == hi) {
    double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

std::vector<double> linear_ticks(double lo, double hi, int target) {
  double span = hi - lo;
  double raw = span / target;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    double v = t;
    if (std::abs(v) < step * 1e-9) v = 0.0;
    ticks.push_back(v);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  int e0 = static_cast<int>(std::floor(std::log10(lo)));
  int e1 = static_cast<int>(std::ceil(std::log10(hi)));
  for (int e = e0; e <= e1; ++e) {
    double v = std::pow(10.0, e);
    if (v >= lo && v <= hi) ticks.push_back(v);
  }
  if (ticks.empty()) ticks = {lo, hi};
  return ticks;
}

}  // namespace

void write_chart(const Chart& chart, std::ostream& out) {
  if (chart.series.empty())
    throw ValidationError("svg chart needs at least one series");
  if (chart.width < 200 || chart.height < 160)
    throw ValidationError("svg chart dimensions too small");

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size())
      throw ValidationError("svg series '" + s.label +
                            "' has mismatched x/y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xv = s.x[i], yv = s.y[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      if (chart.log_y && yv <= 0.0) continue;
      x_lo = std::min(x_lo, xv);
      x_hi = std::max(x_hi, xv);
      y_lo = std::min(y_lo, yv);
      y_hi = std::max(y_hi, yv);
    }
  }
  if (!std::isfinite(x_lo) || !std::isfinite(y_lo))
    throw ValidationError("svg chart has no plottable points");

  Range xr = pad_range(x_lo, x_hi, false);
  Range yr = pad_range(y_lo, y_hi, chart.log_y);

  double plot_w = chart.width - kMarginLeft - kMarginRight;
  double plot_h = chart.height - kMarginTop - kMarginBottom;
  auto map_x = [&](double v) {
    return kMarginLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto map_y = [&](double v) {
    double f = chart.log_y
                   ? (std::log(v) - std::log(yr.lo)) /
                         (std::log(yr.hi) - std::log(yr.lo))
                   : (v - yr.lo) / (yr.hi - yr.lo);
    return kMarginTop + (1.0 - f) * plot_h;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width
      << "\" height=\"" << chart.height << "\" viewBox=\"0 0 " << chart.width
      << " " << chart.height << "\">\n";
  out << "<rect width=\"" << chart.width << "\" height=\"" << chart.height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << chart.width / 2 << "\" y=\"24\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"16\">" << escape(chart.title)
      << "</text>\n";

  // frame
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << px(plot_w) << "\" height=\"" << px(plot_h)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  std::vector<double> xticks = linear_ticks(xr.lo, xr.hi, 6);
  std::vector<double> yticks =
      chart.log_y ? log_ticks(yr.lo, yr.hi) : linear_ticks(yr.lo, yr.hi, 6);

  for (double t : xticks) {
    double x = map_x(t);
    out << "<line x1=\"" << px(x) << "\" y1=\"" << px(kMarginTop + plot_h)
        << "\" x2=\"" << px(x) << "\" y2=\"" << px(kMarginTop + plot_h + 5)
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << px(x) << "\" y=\"" << px(kMarginTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  for (double t : yticks) {
    double y = map_y(t);
    out << "<line x1=\"" << px(kMarginLeft - 5) << "\" y1=\"" << px(y)
        << "\" x2=\"" << px(kMarginLeft) << "\" y2=\"" << px(y)
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << px(kMarginLeft - 8) << "\" y=\"" << px(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << tick_label(t) << "</text>\n";
  }

  out << "<text x=\"" << px(kMarginLeft + plot_w / 2) << "\" y=\""
      << px(chart.height - 12) << "\" text-anchor=\"middle\""
      << " font-family=\"sans-serif\" font-size=\"13\">"
      << escape(chart.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << px(kMarginTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"13\" transform=\"rotate(-90 18 "
      << px(kMarginTop + plot_h / 2) << ")\">" << escape(chart.y_label)
      << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const char* color = kPalette[si % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xv = s.x[i], yv = s.y[i];
      if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
      if (chart.log_y && yv <= 0.0) continue;
      if (!first) out << " ";
      out << px(map_x(xv)) << "," << px(map_y(yv));
      first = false;
    }
    out << "\"/>\n";
  }

  // legend in the top-right corner of the plot area
  double lx = kMarginLeft + plot_w - 150;
  double ly = kMarginTop + 10;
  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    if (s.label.empty()) continue;
    const char* color = kPalette[si % kPaletteSize];
    out << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly + 4) << "\" x2=\""
        << px(lx + 22) << "\" y2=\"" << px(ly + 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << px(lx + 28) << "\" y=\"" << px(ly + 8)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(s.label) << "</text>\n";
    ly += 18;
  }

  out << "</svg>\n";
}

}  // namespace spinmz::svg
