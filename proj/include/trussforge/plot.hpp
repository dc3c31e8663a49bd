#pragma once

// Static SVG plots of a run trace. Plain text output, no plotting dependency.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "trussforge/trace.hpp"

namespace trussforge {

namespace plot {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color;
  bool dashed = false;
};

inline const char* palette(std::size_t i) {
  static const char* c[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return c[i % 10];
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Long traces get thinned before they hit the SVG.
inline std::vector<std::size_t> pick(std::size_t n, std::size_t max_points = 1500) {
  std::vector<std::size_t> idx;
  const std::size_t step = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
  for (std::size_t i = 0; i < n; i += step) idx.push_back(i);
  if (n > 0 && idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

struct Box {
  double x0, y0, w, h;
};

/// One x/y panel with axes, ticks, legend.
inline void panel(std::ostringstream& os, const Box& b, const std::string& title,
                  const std::string& xlabel, const std::string& ylabel,
                  const std::vector<Series>& series) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const Series& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double L = b.x0 + 60, R = b.x0 + b.w - 10, T = b.y0 + 25, B = b.y0 + b.h - 35;
  auto sx = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (R - L); };
  auto sy = [&](double v) { return B - (v - ymin) / (ymax - ymin) * (B - T); };

  os << "<text x=\"" << num((L + R) / 2) << "\" y=\"" << num(b.y0 + 16)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  os << "<rect x=\"" << num(L) << "\" y=\"" << num(T) << "\" width=\"" << num(R - L)
     << "\" height=\"" << num(B - T) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + k * (xmax - xmin) / 4, yv = ymin + k * (ymax - ymin) / 4;
    os << "<line x1=\"" << num(sx(xv)) << "\" y1=\"" << num(T) << "\" x2=\"" << num(sx(xv))
       << "\" y2=\"" << num(B) << "\" stroke=\"#ddd\"/>\n";
    os << "<line x1=\"" << num(L) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << num(R)
       << "\" y2=\"" << num(sy(yv)) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(B + 14)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(xv) << "</text>\n";
    os << "<text x=\"" << num(L - 4) << "\" y=\"" << num(sy(yv) + 3)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << num((L + R) / 2) << "\" y=\"" << num(B + 28)
     << "\" text-anchor=\"middle\" font-size=\"11\">" << xlabel << "</text>\n";
  os << "<text transform=\"translate(" << num(b.x0 + 12) << "," << num((T + B) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" << ylabel << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\""
       << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t k : pick(s.x.size())) os << num(sx(s.x[k])) << ',' << num(sy(s.y[k])) << ' ';
    os << "\"/>\n";
    const double ly = T + 12 + 13 * static_cast<double>(i);
    os << "<line x1=\"" << num(R - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(R - 92)
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\""
       << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    os << "<text x=\"" << num(R - 88) << "\" y=\"" << num(ly) << "\" font-size=\"10\">" << s.label
       << "</text>\n";
  }
}

inline std::string open_svg(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

}  // namespace plot

/// Reference and actual controlled-point path, isometric projection.
inline std::string trajectory_svg(const Trace& t) {
  std::ostringstream os;
  os << plot::open_svg(520, 480);
  const auto rx = t.series("ref_x"), ry = t.series("ref_y"), rz = t.series("ref_z");
  const auto ax = t.series("act_x"), ay = t.series("act_y"), az = t.series("act_z");
  const double c = std::cos(std::numbers::pi / 6), s = 0.5;
  auto proj = [&](const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& z, plot::Series& out) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      out.x.push_back((x[i] - y[i]) * c);
      out.y.push_back(z[i] + (x[i] + y[i]) * s);
    }
  };
  plot::Series ref{"reference", {}, {}, "#1f77b4", true};
  plot::Series act{"actual", {}, {}, "#d62728", false};
  proj(rx, ry, rz, ref);
  proj(ax, ay, az, act);
  plot::panel(os, {0, 0, 520, 480}, "3D trajectory (isometric)", "(x - y) cos 30", "z + (x + y) sin 30",
              {ref, act});
  os << "</svg>\n";
  return os.str();
}

/// Reference vs actual per axis against time.
inline std::string tracking_svg(const Trace& t) {
  std::ostringstream os;
  os << plot::open_svg(720, 660);
  const auto time = t.series("time");
  const char* axes[3] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    plot::Series ref{"reference", time, t.series(std::string("ref_") + axes[k]), "#1f77b4", true};
    plot::Series act{"actual", time, t.series(std::string("act_") + axes[k]), "#d62728", false};
    plot::panel(os, {0, 220.0 * k, 720, 220}, std::string(axes[k]) + "-axis tracking", "time (s)",
                std::string(axes[k]) + " (m)", {ref, act});
  }
  os << "</svg>\n";
  return os.str();
}

/// Measured member forces, plus commanded vs measured controlled force.
inline std::string member_forces_svg(const Trace& t) {
  std::ostringstream os;
  os << plot::open_svg(720, 520);
  const auto time = t.series("time");
  std::vector<plot::Series> members;
  for (std::size_t m = 0; t.has("m" + std::to_string(m) + "_force"); ++m) {
    members.push_back({"m" + std::to_string(m), time, t.series("m" + std::to_string(m) + "_force"),
                       plot::palette(m), false});
  }
  plot::panel(os, {0, 0, 720, 260}, "Internal force", "time (s)", "member force (N)", members);
  plot::Series ref{"reference", time, t.series("force_ref"), "#1f77b4", true};
  plot::Series act{"measured", time, t.series("force_act"), "#d62728", false};
  plot::panel(os, {0, 260, 720, 260}, "Controlled force", "time (s)", "force (N)", {ref, act});
  os << "</svg>\n";
  return os.str();
}

/// Writes trajectory.svg, tracking.svg and member_forces.svg into `dir`.
inline void write_plots(const Trace& t, const std::string& dir) {
  plot::write_file(dir + "/trajectory.svg", trajectory_svg(t));
  plot::write_file(dir + "/tracking.svg", tracking_svg(t));
  plot::write_file(dir + "/member_forces.svg", member_forces_svg(t));
}

}  // namespace trussforge
