#ifndef EOSQ_IO_SVG_HPP
#define EOSQ_IO_SVG_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"

namespace eosq::io {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* c[] = {"#c0392b", "#2c6fbb", "#27ae60", "#8e44ad", "#d68910", "#5d6d7e"};
  return c[i % 6];
}

inline std::string esc(const std::string& s) {
  std::string o;
  for (char ch : s) {
    if (ch == '<') o += "&lt;";
    else if (ch == '>') o += "&gt;";
    else if (ch == '&') o += "&amp;";
    else o += ch;
  }
  return o;
}

}  // namespace detail

inline std::string render(const LinePlot& p, int width = 720, int height = 440) {
  const double l = 70, r = 170, t = 40, b = 55;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x1 > x0)) { x0 = 0; x1 = 1; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = width - l - r, ph = height - t - b;
  auto sx = [&](double v) { return l + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return t + (y1 - v) / (y1 - y0) * ph; };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::esc(p.title)
    << "</text>\n";
  o << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << t + ph + 16 << "\" text-anchor=\"middle\">" << num(xv)
      << "</text>\n";
    o << "<text x=\"" << l - 6 << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
  }
  if (y0 < 0 && y1 > 0)
    o << "<line x1=\"" << l << "\" x2=\"" << l + pw << "\" y1=\"" << num(sy(0)) << "\" y2=\"" << num(sy(0))
      << "\" stroke=\"#bbb\"/>\n";
  o << "<text x=\"" << l + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">" << detail::esc(p.xlabel)
    << "</text>\n";
  o << "<text transform=\"translate(16," << t + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::esc(p.ylabel) << "</text>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    o << "<polyline fill=\"none\" stroke=\"" << detail::palette(k) << "\" stroke-width=\"1.6\""
      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) o << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
    o << "\"/>\n";
    double ly = t + 10 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << l + pw + 12 << "\" x2=\"" << l + pw + 36 << "\" y1=\"" << ly << "\" y2=\"" << ly
      << "\" stroke=\"" << detail::palette(k) << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
      << "/>\n";
    o << "<text x=\"" << l + pw + 42 << "\" y=\"" << ly + 4 << "\">" << detail::esc(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// Grey-scale density map over a regular grid, row-major in y.
inline std::string render_map(const std::string& title, const std::vector<double>& xs, const std::vector<double>& ys,
                              const std::vector<double>& z, int size = 480) {
  std::ostringstream o;
  const double m = 40;
  double zmax = 0;
  for (double v : z) zmax = std::max(zmax, v);
  if (!(zmax > 0)) zmax = 1;
  double cw = (size - 2 * m) / static_cast<double>(xs.size()), ch = (size - 2 * m) / static_cast<double>(ys.size());
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << size / 2 << "\" y=\"22\" text-anchor=\"middle\">" << detail::esc(title) << "</text>\n";
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double v = z[j * xs.size() + i] / zmax;
      int g = static_cast<int>(std::lround(255 * (1 - v)));
      o << "<rect x=\"" << num(m + cw * i) << "\" y=\"" << num(size - m - ch * (j + 1)) << "\" width=\"" << num(cw + 0.05)
        << "\" height=\"" << num(ch + 0.05) << "\" fill=\"rgb(" << g << "," << g << ",255)\"/>\n";
    }
  o << "<text x=\"" << size / 2 << "\" y=\"" << size - 10 << "\" text-anchor=\"middle\">Re alpha</text>\n";
  o << "<text transform=\"translate(14," << size / 2 << ") rotate(-90)\" text-anchor=\"middle\">Im alpha</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace eosq::io

#endif
