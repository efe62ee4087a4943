#include "ipdd/datasets.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ipdd/report.hpp"
#include "ipdd/rng.hpp"

namespace ipdd {

void DriftSpec::validate(int stream_length) const {
  int prev = -1;
  for (const int p : positions) {
    if (p <= prev) throw std::invalid_argument("drift: positions must be strictly increasing");
    if (p < 0 || p >= stream_length)
      throw std::invalid_argument("drift: position outside the stream");
    prev = p;
  }
  if (kind != DriftKind::abrupt && transition_length < 1)
    throw std::invalid_argument("drift: transition_length must be >= 1");
}

namespace {

// Fraction of the transition completed at instance t for a window starting
// at pos: 0 before the window, 1 from its end on, linear within.
double ramp(int t, int pos, int len) {
  if (t < pos) return 0.0;
  const double s = static_cast<double>(t - pos + 1) / static_cast<double>(len + 1);
  return std::min(s, 1.0);
}

}  // namespace

LabeledDataset gen_sine(int n, const DriftSpec& drift, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("gen_sine: n must be positive");
  drift.validate(n);

  LabeledDataset ds;
  ds.features.resize(n, 4);
  ds.labels.resize(static_cast<std::size_t>(n));
  ds.feature_names = {"x1", "x2", "x3", "x4"};
  ds.num_classes = 2;

  Rng rng(seed);
  for (int t = 0; t < n; ++t) {
    const double x1 = rng.uniform01();
    const double x2 = rng.uniform01();
    ds.features(t, 0) = x1;
    ds.features(t, 1) = x2;
    ds.features(t, 2) = rng.uniform01();
    ds.features(t, 3) = rng.uniform01();

    int label = 0;
    switch (drift.kind) {
      case DriftKind::abrupt: {
        int flips = 0;
        for (const int p : drift.positions) flips += (t >= p) ? 1 : 0;
        const bool base = x2 < std::sin(M_PI * x1);
        label = (base != (flips % 2 == 1)) ? 1 : 0;
        break;
      }
      case DriftKind::gradual: {
        // Concepts alternate per position; within a window the new rule is
        // used with the ramp probability.
        int settled = 0;
        double mix = 0.0;
        for (const int p : drift.positions) {
          const double s = ramp(t, p, drift.transition_length);
          if (s >= 1.0) {
            ++settled;
          } else if (s > 0.0) {
            mix = s;
          }
        }
        bool flipped = settled % 2 == 1;
        if (mix > 0.0 && rng.uniform01() < mix) flipped = !flipped;
        const bool base = x2 < std::sin(M_PI * x1);
        label = (base != flipped) ? 1 : 0;
        break;
      }
      case DriftKind::incremental: {
        double phase = 0.0;
        for (const int p : drift.positions)
          phase += (M_PI / 2.0) * ramp(t, p, drift.transition_length);
        label = (x2 < std::sin(M_PI * x1 + phase)) ? 1 : 0;
        break;
      }
    }
    ds.labels[static_cast<std::size_t>(t)] = label;
  }
  return ds;
}

namespace {

double parse_numeric(const std::string& cell, int line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE)
    throw std::runtime_error("csv line " + std::to_string(line_no) +
                             ": non-numeric cell '" + cell + "'");
  return v;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path.string());
  const std::vector<std::string> header = split_csv_line(line, schema.delimiter);

  int label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == schema.label_column) label_col = static_cast<int>(i);
  if (label_col < 0)
    throw std::runtime_error("csv: label column '" + schema.label_column + "' not found");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, schema.delimiter);
    if (fields.size() != header.size())
      throw std::runtime_error("csv line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) + " fields");
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == label_col) {
        raw_labels.push_back(fields[i]);
      } else {
        row.push_back(parse_numeric(fields[i], line_no));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("csv: no data rows in " + path.string());

  LabeledDataset ds;
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size());
  ds.features.resize(n, d);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < d; ++c) ds.features(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];

  for (std::size_t i = 0; i < header.size(); ++i)
    if (static_cast<int>(i) != label_col) ds.feature_names.push_back(header[i]);

  // Dense label ids in order of first appearance.
  std::map<std::string, int> label_ids;
  ds.labels.reserve(raw_labels.size());
  for (const auto& raw : raw_labels) {
    auto [it, inserted] = label_ids.try_emplace(raw, static_cast<int>(label_ids.size()));
    if (inserted && schema.class_count > 0 &&
        static_cast<int>(label_ids.size()) > schema.class_count)
      throw std::runtime_error("csv: unknown label value '" + raw +
                               "' exceeds declared class count");
    ds.labels.push_back(it->second);
  }
  ds.num_classes = schema.class_count > 0 ? schema.class_count
                                          : static_cast<int>(label_ids.size());
  if (ds.num_classes < 2)
    throw std::runtime_error("csv: fewer than two classes in " + path.string());

  // Min-max scale each column from the training prefix only. Later rows may
  // fall outside [0,1]; they are left unclamped so feature drift survives
  // preprocessing.
  const int prefix = std::clamp(
      static_cast<int>(std::floor(n * schema.scale_prefix_frac)), 1, n);
  for (int c = 0; c < d; ++c) {
    const double lo = ds.features.col(c).head(prefix).minCoeff();
    const double hi = ds.features.col(c).head(prefix).maxCoeff();
    if (hi > lo) {
      ds.features.col(c) = (ds.features.col(c).array() - lo) / (hi - lo);
    } else {
      ds.features.col(c).setZero();
    }
  }
  return ds;
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path.string());
  for (int c = 0; c < ds.cols(); ++c) {
    const std::string name = c < static_cast<int>(ds.feature_names.size())
                                 ? ds.feature_names[static_cast<std::size_t>(c)]
                                 : "f" + std::to_string(c);
    out << name << ',';
  }
  out << label_column << '\n';
  char buf[40];
  for (int r = 0; r < ds.rows(); ++r) {
    for (int c = 0; c < ds.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.features(r, c));
      out << buf << ',';
    }
    out << ds.labels[static_cast<std::size_t>(r)] << '\n';
  }
}

ChunkedStream chunk_stream(const LabeledDataset& ds, double init_frac, double chunk_frac) {
  if (!(init_frac > 0.0) || !(chunk_frac > 0.0) || init_frac + chunk_frac > 1.0)
    throw std::invalid_argument("chunk_stream: fractions out of range");
  const int n = ds.rows();
  const int init_count = static_cast<int>(std::floor(n * init_frac));
  const int chunk_size = static_cast<int>(std::floor(n * chunk_frac));
  if (init_count < 1 || chunk_size < 1)
    throw std::invalid_argument("chunk_stream: dataset too small for the given fractions");

  ChunkedStream out;
  out.initial = slice_rows(ds, 0, init_count);
  out.num_classes = ds.num_classes;
  int chunk_index = 0;
  for (int start = init_count; start < n; start += chunk_size) {
    const int end = std::min(start + chunk_size, n);
    StreamChunk chunk;
    chunk.chunk_index = chunk_index++;
    chunk.features = ds.features.middleRows(start, end - start);
    chunk.labels.assign(ds.labels.begin() + start, ds.labels.begin() + end);
    out.chunks.push_back(std::move(chunk));
  }
  return out;
}

}  // namespace ipdd
