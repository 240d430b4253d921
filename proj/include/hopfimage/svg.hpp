#pragma once

#include <algorithm>
#include <sstream>
#include <string>

#include "hopfimage/io.hpp"
#include "hopfimage/spectra.hpp"

namespace hopfimage {

/// Static bar chart of an atomic measure: linear x axis over [0, N], bar
/// height proportional to weight.
inline std::string measure_svg(const SpectralMeasure& m) {
  constexpr double width = 640.0, height = 360.0;
  constexpr double left = 50.0, right = 20.0, top = 30.0, bottom = 40.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double n = std::max(1.0, static_cast<double>(m.n));
  double max_w = 0.0;
  for (const Atom& a : m.atoms) max_w = std::max(max_w, a.weight);
  if (max_w <= 0.0) max_w = 1.0;
  const double bar = std::max(2.0, plot_w / (4.0 * n + 4.0));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  out << "<title>mu^" << m.r << " for N = " << m.n << "</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double y0 = top + plot_h;
  out << "<line x1=\"" << left << "\" y1=\"" << y0 << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << left << "\" y=\"" << y0 + 20
      << "\" font-size=\"12\" text-anchor=\"middle\">0</text>\n";
  out << "<text x=\"" << left + plot_w << "\" y=\"" << y0 + 20
      << "\" font-size=\"12\" text-anchor=\"middle\">" << m.n << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
      << "\" font-size=\"12\" text-anchor=\"end\">" << format_sig15(max_w) << "</text>\n";
  for (const Atom& a : m.atoms) {
    const double cx = left + plot_w * a.location / n;
    const double h = plot_h * a.weight / max_w;
    out << "<rect x=\"" << cx - bar / 2 << "\" y=\"" << y0 - h << "\" width=\"" << bar
        << "\" height=\"" << h << "\" fill=\"steelblue\"><title>x="
        << format_sig15(a.location) << " w=" << format_sig15(a.weight)
        << "</title></rect>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hopfimage
