#include "kfree/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kfree/io.hpp"

namespace kfree {

namespace {

const char* k_palette[] = {"#2563eb", "#dc2626", "#059669",
                           "#d97706", "#7c3aed", "#0891b2"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Tick step: largest of {1,2,5}*10^e giving at least 4 intervals.
double tick_step(double span) {
  if (!(span > 0)) return 1.0;
  double raw = span / 4.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {5.0, 2.0, 1.0})
    if (m * mag <= raw) return m * mag;
  return mag;
}

std::string tick_label(double v, double step) {
  char buf[32];
  int decimals = 0;
  if (step < 1.0) decimals = std::min(6, (int)std::ceil(-std::log10(step)));
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
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

}  // namespace

std::string render_plot_svg(const std::vector<PlotSeries>& series,
                            const PlotStyle& style) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) { xmin = 0; xmax = 1; }
  if (!(ymin <= ymax)) { ymin = 0; ymax = 1; }
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad; xmax += xpad;
  ymin -= ypad; ymax += ypad;

  const double w = style.width, h = style.height;
  const double ml = 64, mr = 16, mt = style.title.empty() ? 16 : 36, mb = 44;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" viewBox=\"0 0 " +
         std::to_string(style.width) + " " + std::to_string(style.height) +
         "\">\n";
  svg += "<!-- generated " + iso8601_utc_now() + " -->\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // grid + ticks
  double xs = tick_step(xmax - xmin), ys = tick_step(ymax - ymin);
  svg += "<g stroke=\"#e5e7eb\" stroke-width=\"1\">\n";
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-12 * xs; t += xs)
    svg += "<line x1=\"" + fmt2(px(t)) + "\" y1=\"" + fmt2(mt) + "\" x2=\"" +
           fmt2(px(t)) + "\" y2=\"" + fmt2(mt + ph) + "\"/>\n";
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-12 * ys; t += ys)
    svg += "<line x1=\"" + fmt2(ml) + "\" y1=\"" + fmt2(py(t)) + "\" x2=\"" +
           fmt2(ml + pw) + "\" y2=\"" + fmt2(py(t)) + "\"/>\n";
  svg += "</g>\n";

  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#374151\">\n";
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-12 * xs; t += xs)
    svg += "<text x=\"" + fmt2(px(t)) + "\" y=\"" + fmt2(mt + ph + 16) +
           "\" text-anchor=\"middle\">" + tick_label(t, xs) + "</text>\n";
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-12 * ys; t += ys)
    svg += "<text x=\"" + fmt2(ml - 6) + "\" y=\"" + fmt2(py(t) + 4) +
           "\" text-anchor=\"end\">" + tick_label(t, ys) + "</text>\n";
  svg += "</g>\n";

  // frame
  svg += "<rect x=\"" + fmt2(ml) + "\" y=\"" + fmt2(mt) + "\" width=\"" +
         fmt2(pw) + "\" height=\"" + fmt2(ph) +
         "\" fill=\"none\" stroke=\"#6b7280\" stroke-width=\"1\"/>\n";

  int ci = 0;
  for (const auto& s : series) {
    std::string color = s.color.empty()
                            ? k_palette[ci % (sizeof k_palette / sizeof *k_palette)]
                            : s.color;
    ++ci;
    if (s.line && s.pts.size() > 1) {
      svg += "<polyline fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\" points=\"";
      for (auto [x, y] : s.pts)
        svg += fmt2(px(x)) + "," + fmt2(py(y)) + " ";
      if (!s.pts.empty()) svg.pop_back();
      svg += "\"/>\n";
    }
    if (!s.line) {
      svg += "<g fill=\"" + color + "\">\n";
      for (auto [x, y] : s.pts)
        svg += "<circle cx=\"" + fmt2(px(x)) + "\" cy=\"" + fmt2(py(y)) +
               "\" r=\"3\"/>\n";
      svg += "</g>\n";
    }
  }

  // labels, title, legend
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#111827\">\n";
  if (!style.x_label.empty())
    svg += "<text x=\"" + fmt2(ml + pw / 2) + "\" y=\"" + fmt2(h - 8) +
           "\" text-anchor=\"middle\">" + escape_xml(style.x_label) +
           "</text>\n";
  if (!style.y_label.empty())
    svg += "<text x=\"14\" y=\"" + fmt2(mt + ph / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           fmt2(mt + ph / 2) + ")\">" + escape_xml(style.y_label) +
           "</text>\n";
  if (!style.title.empty())
    svg += "<text x=\"" + fmt2(w / 2) +
           "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape_xml(style.title) + "</text>\n";
  double ly = mt + 14;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].name.empty()) continue;
    std::string color = series[i].color.empty()
                            ? k_palette[i % (sizeof k_palette / sizeof *k_palette)]
                            : series[i].color;
    svg += "<rect x=\"" + fmt2(ml + 10) + "\" y=\"" + fmt2(ly - 8) +
           "\" width=\"14\" height=\"4\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + fmt2(ml + 30) + "\" y=\"" + fmt2(ly - 2) +
           "\" font-size=\"11\">" + escape_xml(series[i].name) + "</text>\n";
    ly += 16;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace kfree
