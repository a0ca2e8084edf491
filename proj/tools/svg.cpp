#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace flexneedlet::cli::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
constexpr int kMarginLeft = 64, kMarginRight = 16, kMarginTop = 30, kMarginBottom = 46;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double transform(double v) const { return log ? std::log10(v) : v; }
};

Axis fit_axis(const std::vector<Series>& series, bool log, bool use_x) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    const auto& v = use_x ? s.x : s.y;
    const auto& other = use_x ? s.y : s.x;
    for (std::size_t i = 0; i < v.size() && i < other.size(); ++i) {
      if (!a.usable(v[i]) || !std::isfinite(other[i])) continue;
      lo = std::min(lo, a.transform(v[i]));
      hi = std::max(hi, a.transform(v[i]));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  } else {
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    const int span = static_cast<int>(a.hi - a.lo);
    const int step = std::max(1, span / 6);
    for (double e = a.lo; e <= a.hi + 1e-9; e += step) out.push_back(e);
    return out;
  }
  const double raw = (a.hi - a.lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double t = std::ceil(a.lo / step) * step; t <= a.hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

void draw_panel(std::string& out, const Panel& p, double ox, int w, int h) {
  const Axis ax = fit_axis(p.series, p.logx, true);
  const Axis ay = fit_axis(p.series, p.logy, false);
  const double x0 = ox + kMarginLeft, x1 = ox + w - kMarginRight;
  const double y0 = h - kMarginBottom, y1 = kMarginTop;
  auto px = [&](double v) { return x0 + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * (x1 - x0); };
  auto py = [&](double v) { return y0 + (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * (y1 - y0); };

  out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) + "\" height=\"" +
         fmt(y0 - y1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double t : ticks(ax)) {
    const double x = x0 + (t - ax.lo) / (ax.hi - ax.lo) * (x1 - x0);
    out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(y0 + 4) +
           "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y0 + 16) + "\" text-anchor=\"middle\">" +
           escape(ax.log ? "1e" + tick_label(t) : tick_label(t)) + "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = y0 + (t - ay.lo) / (ay.hi - ay.lo) * (y1 - y0);
    out += "<line x1=\"" + fmt(x0 - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#444\"/>\n";
    out += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
           escape(ay.log ? "1e" + tick_label(t) : tick_label(t)) + "</text>\n";
  }
  out += "<text x=\"" + fmt(0.5 * (x0 + x1)) + "\" y=\"" + fmt(y1 - 10) + "\" text-anchor=\"middle\" font-weight=\"bold\">" +
         escape(p.title) + "</text>\n";
  out += "<text x=\"" + fmt(0.5 * (x0 + x1)) + "\" y=\"" + fmt(h - 8.0) + "\" text-anchor=\"middle\">" +
         escape(p.xlabel) + "</text>\n";
  out += "<text transform=\"translate(" + fmt(ox + 14) + "," + fmt(0.5 * (y0 + y1)) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(p.ylabel) + "</text>\n";

  std::size_t longest = 0;
  for (const auto& series : p.series) longest = std::max(longest, series.name.size());
  // Approximate glyph width of the 11px font.
  const double legend_w = 30.0 + 6.2 * static_cast<double>(longest);
  const double lx = std::max(x0 + 4.0, x1 - 6.0 - legend_w);
  std::string legend;
  if (!p.series.empty()) {
    legend += "<rect x=\"" + fmt(lx - 4) + "\" y=\"" + fmt(y1 + 4) + "\" width=\"" + fmt(legend_w + 4) +
           "\" height=\"" + fmt(14.0 * static_cast<double>(p.series.size()) + 6) +
           "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#ccc\"/>\n";
  }
  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const auto& series = p.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
      }
      pts.clear();
    };
    for (std::size_t i = 0; i < series.x.size() && i < series.y.size(); ++i) {
      if (!ax.usable(series.x[i]) || !ay.usable(series.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += fmt(px(series.x[i])) + "," + fmt(py(series.y[i]));
    }
    flush();
    const double ly = y1 + 14.0 + 14.0 * static_cast<double>(s);
    legend += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(lx + 18) + "\" y2=\"" +
           fmt(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    legend += "<text x=\"" + fmt(lx + 22) + "\" y=\"" + fmt(ly) + "\">" + escape(series.name) + "</text>\n";
  }
  out += legend;
}

}  // namespace

std::string render(const std::vector<Panel>& panels, int panel_width, int panel_height) {
  const int width = panel_width * static_cast<int>(std::max<std::size_t>(1, panels.size()));
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(panel_height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(out, panels[i], static_cast<double>(i) * panel_width, panel_width, panel_height);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace flexneedlet::cli::svg
