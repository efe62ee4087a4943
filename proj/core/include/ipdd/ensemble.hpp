#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipdd/data.hpp"
#include "ipdd/nn.hpp"

namespace ipdd {

/// Pairwise-disjoint index sets into a training pool.
struct SubsampleSet {
  std::vector<std::vector<int>> subsamples;
  int subsample_size = 0;
  std::uint64_t seed = 0;
};

/// Draws m pairwise-disjoint subsamples of size N from a seeded shuffle of
/// [0, pool_size). Throws when m*N > pool_size.
SubsampleSet generate_subsamples(int pool_size, int N, int m, std::uint64_t seed);

/// A group of models within delta of its representative (the first model
/// assigned). The member count is the k this bucket contributes to
/// k-anonymity.
struct Bucket {
  ModelParams representative;
  std::vector<ModelParams> members;
  std::vector<int> source_subsample_ids;

  int size() const { return static_cast<int>(members.size()); }
};

/// Greedy first-fit bucketing in input order: each model joins the first
/// bucket whose representative is within delta, else founds a new bucket.
/// Result sorted by member count descending, ties by creation order.
std::vector<Bucket> bucket_models(std::span<const ModelParams> models, double delta);

/// The k bucket-mean models used jointly for prediction and uncertainty.
struct Ensemble {
  std::vector<ModelParams> members;  // aligned with bucket_sizes
  std::vector<int> bucket_sizes;     // descending
  double delta = 0.0;
  int requested_k = 0;
  int effective_k = 0;

  bool degraded() const { return effective_k < requested_k; }
};

struct EnsembleBuildOptions {
  /// 1 trains every model from one shared initialization; larger values
  /// spread the m models over that many distinct initializations.
  int init_seed_count = 1;
};

struct EnsembleBuild {
  Ensemble ensemble;
  std::vector<Bucket> buckets;
  SubsampleSet subsamples;
  std::vector<ModelParams> models;  // trained per-subsample models, input order
  std::vector<std::string> warnings;
};

/// Trains m models on disjoint subsamples of the pool (shared initialization
/// by default), buckets them at delta, and returns the means of the top-k
/// buckets. When fewer than k buckets exist the ensemble degrades to
/// effective_k = bucket count and a warning is recorded.
EnsembleBuild build_ensemble(const LabeledDataset& pool, const Architecture& arch,
                             const TrainConfig& train_cfg, int N, int m,
                             double delta, int k, std::uint64_t seed,
                             const EnsembleBuildOptions& opts = {});

struct KAnonymityReport {
  std::vector<int> bucket_sizes;  // descending
  int max_k = 0;
  bool sources_disjoint = true;
};

KAnonymityReport kanonymity_report(std::span<const Bucket> buckets);

}  // namespace ipdd
