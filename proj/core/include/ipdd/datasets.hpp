#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ipdd/data.hpp"

namespace ipdd {

enum class DriftKind { abrupt, gradual, incremental };

/// Where and how the generated concept changes. `positions` are instance
/// indices, strictly increasing and inside the stream. `transition_length`
/// applies to gradual and incremental drifts only.
struct DriftSpec {
  DriftKind kind = DriftKind::abrupt;
  std::vector<int> positions;
  int transition_length = 1;

  static DriftSpec none() { return DriftSpec{DriftKind::abrupt, {}, 1}; }
  void validate(int stream_length) const;
};

/// Four-attribute Sine stream: features i.i.d. Uniform(0,1); base concept
/// labels an instance 1 iff x2 < sin(pi * x1); x3, x4 are distractors.
/// Abrupt drift flips the label rule at each position; gradual drift mixes
/// old and new rule with a linearly ramping probability over the transition
/// window; incremental drift shifts the boundary phase by pi/2 per position,
/// ramped across the window. Deterministic per seed.
LabeledDataset gen_sine(int n, const DriftSpec& drift, std::uint64_t seed);

struct CsvSchema {
  std::string label_column;
  int class_count = 0;  // 0: infer from the file
  char delimiter = ',';
  /// Fraction of leading rows whose min/max drive feature scaling. Scaling
  /// must not look ahead past the training prefix.
  double scale_prefix_frac = 0.10;
};

/// Loads an RFC-4180-style CSV (header row, UTF-8). Features are min-max
/// scaled per column using statistics of the training prefix only; columns
/// that are constant over the prefix scale to 0. Labels are mapped to dense
/// ids in order of first appearance.
LabeledDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes the dataset in the same CSV dialect load_csv accepts.
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path,
               const std::string& label_column = "label");

/// One unit of stream arrival. Labels are carried but treated as held back;
/// the stream engine only reads them through its label-request path.
struct StreamChunk {
  int chunk_index = 0;
  Eigen::MatrixXd features;
  std::vector<int> labels;

  int rows() const { return static_cast<int>(features.rows()); }
};

struct ChunkedStream {
  LabeledDataset initial;
  std::vector<StreamChunk> chunks;
  int num_classes = 0;
};

/// Splits a temporally ordered dataset into an initial training slice
/// (first floor(n*init_frac) rows) and consecutive chunks of
/// floor(n*chunk_frac) rows; the last chunk may be short. Order preserved.
ChunkedStream chunk_stream(const LabeledDataset& ds, double init_frac = 0.10,
                           double chunk_frac = 0.02);

}  // namespace ipdd
