#pragma once

#include <cstdint>
#include <vector>

#include "ipdd/data.hpp"
#include "ipdd/ensemble.hpp"
#include "ipdd/nn.hpp"

namespace ipdd {

/// Inputs to the closed-form recurrence lower bounds. q := sigma2/(b*delta^2)
/// is clamped to [0, 1]; a clamp at 1 means the bound is vacuous.
struct BoundInputs {
  int m = 2;        // number of independently trained models
  int b = 1;        // minibatches per epoch
  int T = 1;        // epochs
  double delta = 0.01;
  double sigma2 = 0.0;  // trace of the per-example gradient covariance
  int k = 2;            // anonymity target (bound_k_anonymity only)
};

/// Lower bound on the probability that at least two of m models recur:
/// (sum_{r=2..m} C(m,r) p^r q^(m-r))^T with p = 1 - q.
double bound_pair_recurrence(const BoundInputs& in);

/// Lower bound on the probability that all m models recur: ((1-q)^m)^T.
double bound_all_recurrence(const BoundInputs& in);

/// Lower bound on k-anonymous recurrence: (sum_{r=k..m} C(m,r) p^r q^(m-r))^T.
/// Requires 2 <= k <= m.
double bound_k_anonymity(const BoundInputs& in);

/// Trace of the empirical covariance of per-example gradients at fixed
/// parameters (population convention, n divisor). batch_size only enters the
/// precondition that the data spans at least two minibatches.
double estimate_sigma2(const LabeledDataset& data, const ModelParams& model,
                       int batch_size);

struct RecurrenceEstimate {
  int trials = 0;
  double recur_freq = 0.0;    // fraction of trials with a bucket of size >= 2
  double recur_freq_k = 0.0;  // fraction with a bucket of size >= k
  double bound_pair = 0.0;
  double bound_k = 0.0;
  double sigma2 = 0.0;
  std::vector<int> max_bucket_sizes;  // one per trial
};

/// Monte Carlo recurrence experiment: per trial, draw fresh disjoint
/// subsamples, train m models from one shared initialization, bucket them at
/// delta and record the largest bucket. The bound columns come from
/// estimate_sigma2 evaluated at the first trial's shared initialization.
RecurrenceEstimate monte_carlo_recurrence(const Architecture& arch,
                                          const LabeledDataset& pool, int m, int N,
                                          double delta, const TrainConfig& train_cfg,
                                          int trials, std::uint64_t seed, int k = 2);

struct TheorySweepRow {
  double delta = 0.0;
  int m = 0;
  int init_count = 1;
  double k_anonymity = 0.0;  // mean over trials of the largest bucket size
  double bound = 0.0;        // pair-recurrence bound at this delta
  double recur_freq = 0.0;
  int trials = 0;
};

/// Sweeps delta (and optionally m and the number of distinct
/// initializations) while re-bucketing each trial's trained model set, so a
/// delta sweep sees identical models at every delta. N = 0 derives the
/// subsample size as pool/m.
std::vector<TheorySweepRow> recurrence_sweep(
    const Architecture& arch, const LabeledDataset& pool,
    const std::vector<int>& ms, const std::vector<double>& deltas,
    const std::vector<int>& init_counts, int trials, const TrainConfig& train_cfg,
    int N, std::uint64_t seed);

}  // namespace ipdd
