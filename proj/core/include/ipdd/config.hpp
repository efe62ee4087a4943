#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipdd/datasets.hpp"
#include "ipdd/stream.hpp"

namespace ipdd {

/// Invalid configuration: the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where the stream comes from: a generator or an ingested CSV.
struct DatasetSpec {
  std::string kind = "sine";  // sine | csv
  int n = 20000;
  std::string drift = "none";  // none | abrupt | gradual | incremental
  std::vector<int> drift_positions;
  int transition_length = 1;
  std::uint64_t seed = 7;
  std::string csv_path;
  std::string label_column = "label";
  int class_count = 0;
  std::string delimiter = ",";
};

struct TheorySpec {
  std::vector<double> deltas = {1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<int> ms = {20};
  std::vector<int> init_counts = {1};
  int trials = 30;
  int pool_n = 2000;
  int subsample_size = 0;  // 0: pool/m
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::string arch = "ann";  // ann | dnn | dashed widths like 16-8
  double delta = 0.01;
  double adwin_delta = 0.001;
  int m = 25;
  int subsample_size = 0;
  int k = 5;
  int init_seed_count = 1;
  TrainConfig train;
  double init_frac = 0.10;
  double chunk_frac = 0.02;
  int window_capacity = 0;
  std::vector<std::string> methods = {"ipdd"};
  std::vector<double> dp_epsilons = {0.1, 0.5, 1.0};
  std::vector<std::uint64_t> seeds = {1};
  TheorySpec theory;
};

/// Parses a flat key=value file ('#' comments, dotted section keys), applies
/// `--set key=value` overrides, validates every key and value, and resolves
/// the result. Unknown keys and malformed values raise ConfigError with the
/// file line (overrides report as line 0).
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Same, starting from built-in defaults with no file.
ExperimentConfig config_from_overrides(const std::vector<std::string>& overrides);

/// Canonical "key=value" lines of the resolved configuration, sorted by key.
std::vector<std::string> canonical_config_lines(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical lines; stable across key reordering in the
/// source file.
std::string config_hash(const ExperimentConfig& cfg);

/// Hidden-layer widths for "ann" (10), "dnn" (10-20-10) or explicit dashed
/// widths; input/output dims are taken from the dataset at run time.
Architecture resolve_architecture(const std::string& name, int input_dim,
                                  int num_classes);

/// Materializes the configured dataset (generator or CSV ingestion).
LabeledDataset make_dataset(const DatasetSpec& spec, double init_frac);

/// Expands method tokens; a bare "dp" expands to dp(eps) per configured
/// epsilon. Throws ConfigError on unknown tokens.
std::vector<Method> resolve_methods(const ExperimentConfig& cfg);

/// StreamConfig for one seed, with the architecture resolved for the dataset.
StreamConfig make_stream_config(const ExperimentConfig& cfg, const LabeledDataset& ds,
                                std::uint64_t seed);

}  // namespace ipdd
