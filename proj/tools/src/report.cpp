#include "stratwave/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stratwave::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::ostream* fallback) {
  if (!path.empty()) {
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open " + path);
    out_ = file_.get();
  } else {
    out_ = fallback;
  }
}

void CsvWriter::header(const std::vector<std::string>& names) {
  columns_ = names.size();
  if (!out_) return;
  for (std::size_t i = 0; i < names.size(); ++i) *out_ << (i ? "," : "") << names[i];
  *out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width differs from header");
  if (!out_) return;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) *out_ << ',';
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, double>) *out_ << format_number(c);
          else if constexpr (std::is_same_v<T, std::string>) *out_ << c;
          else *out_ << c;
        },
        cells[i]);
  }
  *out_ << '\n';
}

void write_loglog_svg(const std::string& path, const SeriesPlot& plot) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < plot.x.size(); ++i)
    if (plot.x[i] > 0 && plot.y[i] > 0 && std::isfinite(plot.y[i])) {
      lx.push_back(std::log10(plot.x[i]));
      ly.push_back(std::log10(plot.y[i]));
    }
  if (lx.empty()) throw std::runtime_error("svg: no positive data to plot");
  double x0 = *std::min_element(lx.begin(), lx.end()), x1 = *std::max_element(lx.begin(), lx.end());
  double y0 = *std::min_element(ly.begin(), ly.end()), y1 = *std::max_element(ly.begin(), ly.end());
  if (x1 - x0 < 1e-9) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
  double py = 0.08 * (y1 - y0);
  y0 -= py;
  y1 += py;
  const double W = 640, Hgt = 420, L = 70, R = 20, T = 40, B = 50;
  auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double v) { return Hgt - B - (v - y0) / (y1 - y0) * (Hgt - T - B); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << plot.title << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << Hgt - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
    char bx[32], by[32];
    std::snprintf(bx, sizeof bx, "%.3g", std::pow(10.0, vx));
    std::snprintf(by, sizeof by, "%.3g", std::pow(10.0, vy));
    s << "<text x=\"" << sx(vx) << "\" y=\"" << Hgt - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << bx
      << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << sy(vy) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << by
      << "</text>\n";
  }
  s << "<text x=\"" << W / 2 << "\" y=\"" << Hgt - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << plot.x_label
    << "</text>\n";
  s << "<text x=\"16\" y=\"" << Hgt / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << Hgt / 2 << ")\">"
    << plot.y_label << "</text>\n";
  auto line = [&](double slope, double icpt, const char* colour, const char* dash) {
    double a = icpt / std::log(10.0);
    s << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(a + slope * x0) << "\" x2=\"" << sx(x1) << "\" y2=\""
      << sy(a + slope * x1) << "\" stroke=\"" << colour << "\" stroke-dasharray=\"" << dash << "\"/>\n";
  };
  if (plot.has_fit) line(plot.fit_slope, plot.fit_intercept, "steelblue", "none");
  if (plot.has_theory) {
    // theory line through the first point
    double icpt = (ly.front() - plot.theory_slope * lx.front()) * std::log(10.0);
    line(plot.theory_slope, icpt, "firebrick", "6,4");
  }
  for (std::size_t i = 0; i < lx.size(); ++i)
    s << "<circle cx=\"" << sx(lx[i]) << "\" cy=\"" << sy(ly[i]) << "\" r=\"3\" fill=\"black\"/>\n";
  s << "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << s.str();
}

}  // namespace stratwave::cli
