#pragma once

#include <fstream>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace stratwave::cli {

// Shortest round-trip text for a double; identical on every run.
std::string format_number(double v);

using Cell = std::variant<double, long long, int, std::string>;

// Writes to a file when a path is given, else to the fallback stream (or nowhere).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::ostream* fallback);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<Cell>& cells);
  bool active() const { return out_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_ = nullptr;
  std::size_t columns_ = 0;
};

struct SeriesPlot {
  std::string title;
  std::string x_label = "t";
  std::string y_label = "|k|";
  std::vector<double> x, y;
  // y = exp(intercept) x^slope lines, drawn when finite.
  double fit_slope = 0.0, fit_intercept = 0.0;
  bool has_fit = false;
  double theory_slope = 0.0;
  bool has_theory = false;
};

// Minimal log-log SVG.
void write_loglog_svg(const std::string& path, const SeriesPlot& plot);

}  // namespace stratwave::cli
