#include "ipdd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ipdd {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv_table(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path.string());
  table.header = split_csv_line(line, delimiter);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv_line(line, delimiter);
    if (row.size() != table.header.size())
      throw std::runtime_error("csv: ragged row in " + path.string());
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("csv writer: row width does not match header");
  rows_.push_back(std::move(cells));
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv writer: cannot open " + path.string());
  for (std::size_t i = 0; i < header_.size(); ++i)
    out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
  for (const auto& row : rows_)
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 360;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 40;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void svg_line_chart(const std::filesystem::path& path, const std::string& title,
                    const std::vector<SvgSeries>& series,
                    const std::vector<int>& markers) {
  std::size_t n = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (const double v : s.values) {
      if (std::isnan(v)) continue;
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (n < 2) n = 2;
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double i) { return kMarginLeft + plot_w * i / static_cast<double>(n - 1); };
  auto sy = [&](double v) { return kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svg: cannot open " + path.string());
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  // axes
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                kMarginLeft, kMarginTop, kMarginLeft, kHeight - kMarginBottom);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight,
                kHeight - kMarginBottom);
  out << buf;
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" font-family=\"sans-serif\" "
                  "font-size=\"10\">%.3g</text>\n",
                  kMarginLeft - 6, sy(v) + 3.0, v);
    out << buf;
  }

  for (const int m : markers) {
    if (m < 0 || static_cast<std::size_t>(m) >= n) continue;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" stroke=\"#d62728\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  sx(m), kMarginTop, sx(m), kHeight - kMarginBottom);
    out << buf;
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 6]
        << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      const double v = series[s].values[i];
      if (std::isnan(v)) continue;
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", sx(static_cast<double>(i)), sy(v));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                  "fill=\"%s\">%s</text>\n",
                  kMarginLeft + 8, kMarginTop + 14 + 14 * static_cast<int>(s),
                  kPalette[s % 6], series[s].label.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace ipdd
