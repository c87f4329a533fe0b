#include "tiltsense/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <sstream>

namespace tiltsense::cli {
namespace {

constexpr double kPanelW = 440.0;
constexpr double kPanelH = 330.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 16.0;
constexpr double kTop = 34.0;
constexpr double kBottom = 52.0;

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

std::string chars(double v, std::chars_format fmt, int precision) {
  char buf[48];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, fmt, precision);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("0");
}

std::string fixed(double v) { return chars(v, std::chars_format::fixed, 2); }

std::string tick_label(double v, double step) {
  if (std::abs(v) < 1e-12 * step) v = 0.0;
  const double mag = std::max(std::abs(v), step);
  if (mag >= 1e4 || mag < 1e-3) return chars(v, std::chars_format::general, 3);
  int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
  const double scaled = step * std::pow(10.0, decimals);
  if (std::abs(scaled - std::round(scaled)) > 1e-9 * scaled) ++decimals;
  return chars(v, std::chars_format::fixed, decimals);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo <= 1e-12 * std::max(std::abs(lo), std::abs(hi))) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

void draw_panel(std::ostringstream& out, const Panel& panel, double ox, double oy) {
  Range xr, yr;
  for (const Series& s : panel.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const auto xt = nice_ticks(xr.lo, xr.hi);
  const auto yt = nice_ticks(std::min(yr.lo, 0.0 < yr.lo && yr.lo < 0.2 * yr.hi ? 0.0 : yr.lo),
                             yr.hi);
  const double x0 = xt.front(), x1 = xt.back();
  const double y0 = yt.front(), y1 = yt.back();
  const double pw = kPanelW - kLeft - kRight;
  const double ph = kPanelH - kTop - kBottom;
  auto sx = [&](double v) { return ox + kLeft + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return oy + kTop + ph - (v - y0) / (y1 - y0) * ph; };

  out << "<g class=\"panel\">\n";
  out << "<text x=\"" << fixed(ox + kLeft + pw / 2) << "\" y=\"" << fixed(oy + 20)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title) << "</text>\n";
  out << "<rect x=\"" << fixed(ox + kLeft) << "\" y=\"" << fixed(oy + kTop) << "\" width=\""
      << fixed(pw) << "\" height=\"" << fixed(ph)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
  for (double t : xt) {
    out << "<line x1=\"" << fixed(sx(t)) << "\" y1=\"" << fixed(oy + kTop + ph) << "\" x2=\""
        << fixed(sx(t)) << "\" y2=\"" << fixed(oy + kTop + ph + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(oy + kTop + ph + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t, xstep) << "</text>\n";
  }
  const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
  for (double t : yt) {
    out << "<line x1=\"" << fixed(ox + kLeft - 5) << "\" y1=\"" << fixed(sy(t)) << "\" x2=\""
        << fixed(ox + kLeft) << "\" y2=\"" << fixed(sy(t)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(ox + kLeft - 8) << "\" y=\"" << fixed(sy(t) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t, ystep) << "</text>\n";
  }
  out << "<text class=\"x-label\" x=\"" << fixed(ox + kLeft + pw / 2) << "\" y=\""
      << fixed(oy + kPanelH - 10) << "\" text-anchor=\"middle\" font-size=\"12\">"
      << escape(panel.x_label) << "</text>\n";
  const double ly = oy + kTop + ph / 2;
  out << "<text class=\"y-label\" x=\"" << fixed(ox + 16) << "\" y=\"" << fixed(ly)
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " << fixed(ox + 16)
      << " " << fixed(ly) << ")\">" << escape(panel.y_label) << "</text>\n";

  for (std::size_t i = 0; i < panel.series.size(); ++i) {
    const Series& s = panel.series[i];
    out << "<polyline data-series=\"" << escape(s.label) << "\" fill=\"none\" stroke=\""
        << s.color << "\" stroke-width=\"1.6\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << " points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
      out << (j ? " " : "") << fixed(sx(s.x[j])) << "," << fixed(sy(s.y[j]));
    }
    out << "\"/>\n";
    const double lx = ox + kLeft + pw - 150;
    const double lyy = oy + kTop + 16 + 16 * static_cast<double>(i);
    out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(lyy - 4) << "\" x2=\""
        << fixed(lx + 24) << "\" y2=\"" << fixed(lyy - 4) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.6\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << "/>\n<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(lyy)
        << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo, lo + 1.0};
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  const double first = std::floor(lo / step + 1e-9) * step;
  const double last = std::ceil(hi / step - 1e-9) * step;
  std::vector<double> ticks;
  const auto n = static_cast<int>(std::llround((last - first) / step));
  for (int i = 0; i <= n; ++i) ticks.push_back(first + i * step);
  if (ticks.size() < 2) ticks.push_back(first + step);
  return ticks;
}

std::string render_svg(const std::vector<Panel>& panels, int columns) {
  columns = std::max(1, columns);
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const double width = kPanelW * std::min<int>(columns, static_cast<int>(panels.size()));
  const double height = kPanelH * rows;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\""
      << fixed(height) << "\" viewBox=\"0 0 " << fixed(width) << " " << fixed(height)
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const int c = static_cast<int>(i) % columns;
    const int r = static_cast<int>(i) / columns;
    draw_panel(out, panels[i], kPanelW * c, kPanelH * r);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace tiltsense::cli
