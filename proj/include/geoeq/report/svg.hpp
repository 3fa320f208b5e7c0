#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace geoeq::report {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
  double width = 1.5;
};

struct Segment {
  double x1, y1, x2, y2;
  bool dashed = false;
};

struct Marker {
  double x, y;
  std::string label;
};

/// A single-panel line chart. Series break at non-finite points.
struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Segment> segments;
  std::vector<Marker> markers;
  std::optional<std::pair<double, double>> y_range;
};

namespace detail {

inline constexpr double kWidth = 640.0;
inline constexpr double kHeight = 420.0;
inline constexpr double kLeft = 64.0;
inline constexpr double kRight = 150.0;
inline constexpr double kTop = 36.0;
inline constexpr double kBottom = 48.0;

inline constexpr std::array<const char*, 6> kPalette = {"#1f4e79", "#b03a2e", "#1e8449",
                                                        "#7d3c98", "#b9770e", "#2e4053"};

inline std::string escape(const std::string& s) {
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

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

inline Frame frame_for(const Plot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto take = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& s : plot.series)
    for (const auto& [x, y] : s.points) take(x, y);
  for (const auto& s : plot.segments) {
    take(s.x1, s.y1);
    take(s.x2, s.y2);
  }
  for (const auto& m : plot.markers) take(m.x, m.y);
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (plot.y_range) std::tie(y0, y1) = *plot.y_range;
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

}  // namespace detail

inline std::string render_svg(const Plot& plot) {
  using namespace detail;
  const Frame f = frame_for(plot);
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<text x=\"{:.1f}\" y=\"20\" font-size=\"13\">{}</text>\n", kLeft,
                     escape(plot.title));

  const double right = kWidth - kRight;
  const double bottom = kHeight - kBottom;
  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#444\"/>\n",
      kLeft, kTop, right - kLeft, bottom - kTop);
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n",
                       f.px(xv), bottom + 15.0, xv);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
                       kLeft - 5.0, f.py(yv) + 4.0, yv);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     0.5 * (kLeft + right), kHeight - 10.0, escape(plot.x_label));
  out += fmt::format(
      "<text x=\"14\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1f})\">{}"
      "</text>\n",
      0.5 * (kTop + bottom), 0.5 * (kTop + bottom), escape(plot.y_label));
  out += fmt::format(
      "<clipPath id=\"plot\"><rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\"/>"
      "</clipPath>\n<g clip-path=\"url(#plot)\">\n",
      kLeft, kTop, right - kLeft, bottom - kTop);

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* colour = kPalette[k % kPalette.size()];
    std::string path;
    bool pen_down = false;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      path += fmt::format("{}{:.2f},{:.2f} ", pen_down ? "L" : "M", f.px(x), f.py(y));
      pen_down = true;
    }
    out += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.1f}\"{}/>\n",
                       path, colour, s.width, s.dashed ? " stroke-dasharray=\"6 4\"" : "");
  }
  for (const auto& s : plot.segments) {
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#1f4e79\" "
        "stroke-width=\"2\"{}/>\n",
        f.px(s.x1), f.py(s.y1), f.px(s.x2), f.py(s.y2),
        s.dashed ? " stroke-dasharray=\"5 4\"" : "");
  }
  out += "</g>\n";
  for (const auto& m : plot.markers) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"#b03a2e\"/>\n",
                       f.px(m.x), f.py(m.y));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", f.px(m.x) + 6.0,
                       f.py(m.y) - 6.0, escape(m.label));
  }
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const double y = kTop + 14.0 + 16.0 * k;
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
        "stroke-width=\"2\"{}/>\n<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
        right + 10.0, y, right + 34.0, y, kPalette[k % kPalette.size()],
        plot.series[k].dashed ? " stroke-dasharray=\"6 4\"" : "", right + 40.0, y + 4.0,
        escape(plot.series[k].label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace geoeq::report
