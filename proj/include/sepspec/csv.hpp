#ifndef SEPSPEC_CSV_HPP
#define SEPSPEC_CSV_HPP

#include <string>
#include <vector>

namespace sepspec {

/// 17-significant-digit decimal form; round-trips doubles bit exactly.
std::string format_g17(double v);

/// RFC-4180-style CSV: CRLF-free simple rows, '.' decimal separator.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& content);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Minimal line plot: one polyline per series, axes with min/max annotations.
std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

}  // namespace sepspec

#endif
