#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ipdd {

/// Round-trip-exact decimal rendering ("%.17g"); NaN renders as "nan".
std::string format_double(double v);

/// One line of an RFC-4180-style CSV, honoring quotes and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, char delimiter);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

/// Reads back any CSV this tool writes.
CsvTable read_csv_table(const std::filesystem::path& path, char delimiter = ',');

/// Minimal CSV table writer: header + rows, '.' decimal, UTF-8, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  void write(const std::filesystem::path& path) const;
  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct SvgSeries {
  std::string label;
  std::vector<double> values;  // x = index
};

/// Single-file SVG line chart with optional vertical marker lines (e.g.
/// detected drift positions).
void svg_line_chart(const std::filesystem::path& path, const std::string& title,
                    const std::vector<SvgSeries>& series,
                    const std::vector<int>& markers = {});

}  // namespace ipdd
