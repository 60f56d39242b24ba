#pragma once

// Static SVG charts. Each chart carries its plotted data as CSV inside an XML
// comment, so a chart can be diffed or re-plotted without the program.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "streamgain/csv.hpp"

namespace streamgain::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional, same length as y
  bool step = false;        // draw as a right-continuous step function
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
  std::vector<std::pair<std::string, double>> vertical_markers;
};

struct BoxStats {
  std::string label;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

namespace detail {

inline constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;
inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

inline std::string escape(const std::string& s) {
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

// "--" may not appear inside an XML comment
inline std::string comment_safe(std::string s) {
  for (std::size_t p; (p = s.find("--")) != std::string::npos;) s.replace(p, 2, "- -");
  return s;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

inline std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double pixel_lo = 0, pixel_hi = 1;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    return pixel_lo + (x - a) / (b - a) * (pixel_hi - pixel_lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double p = std::floor(std::log10(lo)); p <= std::ceil(std::log10(hi)); ++p) {
        const double v = std::pow(10.0, p);
        if (v >= lo && v <= hi) out.push_back(v);
      }
      return out;
    }
    for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
    return out;
  }
};

inline Axis make_axis(std::vector<double> values, bool log, double p0, double p1) {
  Axis a;
  a.log = log;
  a.pixel_lo = p0;
  a.pixel_hi = p1;
  values.erase(std::remove_if(values.begin(), values.end(),
                              [&](double v) { return !std::isfinite(v) || (log && v <= 0); }),
               values.end());
  if (values.empty()) return a;
  a.lo = *std::min_element(values.begin(), values.end());
  a.hi = *std::max_element(values.begin(), values.end());
  if (a.hi == a.lo) {
    a.lo = log ? a.lo / 2 : a.lo - 0.5;
    a.hi = log ? a.hi * 2 : a.hi + 0.5;
  }
  return a;
}

inline void frame(std::ostringstream& os, const std::string& title, const std::string& xl, const std::string& yl) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<text x=\"" << fmt(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  os << "<text transform=\"translate(18," << fmt(kTop + (kHeight - kTop - kBottom) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
     << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
}

inline void axes(std::ostringstream& os, const Axis& ax, const Axis& ay) {
  for (double v : ax.ticks())
    os << "<text x=\"" << fmt(ax.map(v)) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
       << tick_label(v) << "</text>\n";
  for (double v : ay.ticks())
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(ay.map(v) + 4) << "\" text-anchor=\"end\">"
       << tick_label(v) << "</text>\n";
}

}  // namespace detail

inline std::string render(const LineChart& chart) {
  using namespace detail;
  std::ostringstream os;
  frame(os, chart.title, chart.x_label, chart.y_label);
  os << "<!-- data\nseries,x,y,err\n";
  for (const auto& s : chart.series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << comment_safe(s.name) << ',' << format_number(s.x[i]) << ',' << format_number(s.y[i]) << ','
         << (i < s.err.size() ? format_number(s.err[i]) : "") << '\n';
  for (const auto& [name, v] : chart.vertical_markers) os << comment_safe(name) << ',' << format_number(v) << ",,\n";
  os << "-->\n";

  std::vector<double> xs, ys;
  for (const auto& s : chart.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      ys.push_back(s.y[i] - e);
      ys.push_back(s.y[i] + e);
    }
  }
  for (const auto& m : chart.vertical_markers) xs.push_back(m.second);
  const Axis ax = make_axis(xs, chart.log_x, kLeft, kWidth - kRight);
  const Axis ay = make_axis(ys, false, kHeight - kBottom, kTop);
  axes(os, ax, ay);

  auto finite_point = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!ax.log || x > 0); };
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream pts;
    double prev_y = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!finite_point(s.x[i], s.y[i])) continue;
      if (s.step && std::isfinite(prev_y)) pts << fmt(ax.map(s.x[i])) << ',' << fmt(ay.map(prev_y)) << ' ';
      pts << fmt(ax.map(s.x[i])) << ',' << fmt(ay.map(s.y[i])) << ' ';
      prev_y = s.y[i];
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
       << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.err.size(); ++i) {
      if (!finite_point(s.x[i], s.y[i]) || !std::isfinite(s.err[i])) continue;
      const double x = ax.map(s.x[i]);
      os << "<line x1=\"" << fmt(x) << "\" x2=\"" << fmt(x) << "\" y1=\"" << fmt(ay.map(s.y[i] - s.err[i]))
         << "\" y2=\"" << fmt(ay.map(s.y[i] + s.err[i])) << "\" stroke=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << kWidth - kRight + 10 << "\" x2=\"" << kWidth - kRight + 30 << "\" y1=\"" << fmt(ly - 4)
       << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kWidth - kRight + 36 << "\" y=\"" << fmt(ly) << "\">" << escape(s.name) << "</text>\n";
  }
  for (const auto& [name, v] : chart.vertical_markers) {
    if (!std::isfinite(v) || (ax.log && v <= 0)) continue;
    const double x = ax.map(v);
    os << "<line x1=\"" << fmt(x) << "\" x2=\"" << fmt(x) << "\" y1=\"" << kTop << "\" y2=\"" << kHeight - kBottom
       << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << fmt(x + 3) << "\" y=\"" << kTop + 12 << "\">" << escape(name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Five-number summary (nearest-rank quartiles) of a sample.
inline BoxStats box_stats(std::string label, std::vector<double> v) {
  BoxStats b;
  b.label = std::move(label);
  if (v.empty()) return b;
  std::sort(v.begin(), v.end());
  auto q = [&](double k) {
    const auto c = static_cast<std::size_t>(std::ceil(k * static_cast<double>(v.size())));
    return v[c == 0 ? 0 : c - 1];
  };
  b.min = v.front();
  b.q1 = q(0.25);
  b.median = q(0.5);
  b.q3 = q(0.75);
  b.max = v.back();
  return b;
}

inline std::string render_boxes(const std::string& title, const std::string& x_label, const std::string& y_label,
                                 const std::vector<BoxStats>& boxes) {
  using namespace detail;
  std::ostringstream os;
  frame(os, title, x_label, y_label);
  os << "<!-- data\nlabel,min,q1,median,q3,max\n";
  for (const auto& b : boxes)
    os << comment_safe(b.label) << ',' << format_number(b.min) << ',' << format_number(b.q1) << ','
       << format_number(b.median) << ',' << format_number(b.q3) << ',' << format_number(b.max) << '\n';
  os << "-->\n";
  std::vector<double> ys;
  for (const auto& b : boxes) {
    ys.push_back(b.min);
    ys.push_back(b.max);
  }
  const Axis ay = make_axis(ys, false, kHeight - kBottom, kTop);
  for (double v : ay.ticks())
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(ay.map(v) + 4) << "\" text-anchor=\"end\">"
       << tick_label(v) << "</text>\n";
  const double slot = (kWidth - kLeft - kRight) / std::max<double>(1.0, static_cast<double>(boxes.size()));
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5), hw = slot * 0.3;
    os << "<line x1=\"" << fmt(cx) << "\" x2=\"" << fmt(cx) << "\" y1=\"" << fmt(ay.map(b.min)) << "\" y2=\""
       << fmt(ay.map(b.max)) << "\" stroke=\"black\"/>\n";
    os << "<rect x=\"" << fmt(cx - hw) << "\" y=\"" << fmt(ay.map(b.q3)) << "\" width=\"" << fmt(2 * hw)
       << "\" height=\"" << fmt(std::max(0.0, ay.map(b.q1) - ay.map(b.q3)))
       << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt(cx - hw) << "\" x2=\"" << fmt(cx + hw) << "\" y1=\"" << fmt(ay.map(b.median))
       << "\" y2=\"" << fmt(ay.map(b.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(cx) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
       << escape(b.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace streamgain::svg
