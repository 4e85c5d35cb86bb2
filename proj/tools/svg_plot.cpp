/* Copyright 2026 The catattack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace catattack::cli {
namespace {

constexpr double kPanelW = 240;
constexpr double kPanelH = 200;
constexpr double kMargin = 40;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Range padded so that flat or single-point data still gets an axis.
std::pair<double, double> axis_range(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 1.0};
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double a = *lo;
  double b = *hi;
  if (b - a < 1e-12) {
    const double pad = std::max(std::abs(a) * 0.1, 1e-3);
    a -= pad;
    b += pad;
  }
  return {a, b};
}

}  // namespace

void write_svg_panels(std::ostream& out, const std::string& x_label,
                      const std::vector<double>& x,
                      const std::vector<Series>& series) {
  const double width = kPanelW * std::max<std::size_t>(series.size(), 1);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << kPanelH << "\" font-family=\"sans-serif\" "
      << "font-size=\"10\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const auto [x0, x1] = axis_range(x);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const auto [y0, y1] = axis_range(s.y);
    const double left = k * kPanelW + kMargin;
    const double right = (k + 1) * kPanelW - 10;
    const double top = 20;
    const double bottom = kPanelH - kMargin;
    const auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (right - left); };
    const auto py = [&](double v) { return bottom - (v - y0) / (y1 - y0) * (bottom - top); };

    out << "<g>\n<text x=\"" << (left + right) / 2 << "\" y=\"12\" "
        << "text-anchor=\"middle\">" << s.name << "</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
        << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
        << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left - 3 << "\" y=\"" << bottom << "\" text-anchor=\"end\">"
        << num(y0) << "</text>\n"
        << "<text x=\"" << left - 3 << "\" y=\"" << top + 8 << "\" text-anchor=\"end\">"
        << num(y1) << "</text>\n"
        << "<text x=\"" << left << "\" y=\"" << bottom + 14 << "\">" << num(x0)
        << "</text>\n"
        << "<text x=\"" << right << "\" y=\"" << bottom + 14
        << "\" text-anchor=\"end\">" << num(x1) << "</text>\n"
        << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 30
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    const std::size_t n = std::min(x.size(), s.y.size());
    if (n > 1) {
      out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) out << px(x[i]) << ',' << py(s.y[i]) << ' ';
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
      out << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(s.y[i])
          << "\" r=\"2.5\" fill=\"#1f5fa8\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace catattack::cli
