#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ipdd/data.hpp"
#include "ipdd/datasets.hpp"
#include "ipdd/ensemble.hpp"
#include "ipdd/metrics.hpp"
#include "ipdd/nn.hpp"

namespace ipdd {

enum class MethodKind { ipdd, no_retrain, adwin_unlim, adwin_lim, dp };

struct Method {
  MethodKind kind = MethodKind::ipdd;
  double epsilon = 0.0;  // dp only

  std::string name() const;
  /// Accepts "ipdd", "no_retrain", "adwin_unlim", "adwin_lim", "dp(0.5)".
  static Method parse(const std::string& token);
};

/// Bounded retraining buffer; eviction is strictly oldest-first.
class TrainingWindow {
 public:
  explicit TrainingWindow(int capacity);

  void append(const Eigen::VectorXd& features, int label);
  void append_all(const LabeledDataset& ds);
  void append_all(const StreamChunk& chunk);

  int size() const { return static_cast<int>(records_.size()); }
  int capacity() const { return capacity_; }
  LabeledDataset to_dataset(int num_classes, std::vector<std::string> feature_names) const;

 private:
  int capacity_;
  std::deque<std::pair<Eigen::VectorXd, int>> records_;
};

struct StreamConfig {
  Architecture arch;
  std::string arch_name = "ann";
  TrainConfig train;
  int m = 25;
  int subsample_size = 0;  // 0: pool size / m, recomputed at every build
  int k = 5;
  double delta = 0.01;
  double adwin_delta = 0.001;
  double init_frac = 0.10;
  double chunk_frac = 0.02;
  int window_capacity = 0;  // 0: twice the initial training size
  int init_seed_count = 1;
  std::uint64_t seed = 1;
};

struct DriftEvent {
  int chunk_index = 0;
  int instance_index = 0;  // index into the evaluated (post-initialization) stream
  int detector_width_before = 0;
  int labels_requested = 0;
};

struct ChunkRecord {
  int chunk_index = 0;
  double accuracy = 0.0;
  double mcc = 0.0;
  double auc = 0.0;  // NaN when undefined for the chunk
  int drifted = 0;
};

struct RunResult {
  std::string method;
  std::string arch_name;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> chunk_predictions;
  std::vector<ChunkRecord> chunk_metrics;
  std::vector<double> signal_series;  // detector input per evaluated instance
  std::vector<DriftEvent> drift_events;
  std::int64_t labels_requested = 0;
  int retrain_count = 0;
  MetricsReport overall;
  double wall_seconds = 0.0;
  int last_effective_k = 0;
  std::vector<std::string> notes;
};

struct Prediction {
  int label = 0;
  Eigen::VectorXd mean_probs;
  std::vector<Eigen::VectorXd> member_probs;
};

/// Mean of the member distributions, argmax class (ties to the lowest id).
Prediction ensemble_predict(const Ensemble& ensemble, const Eigen::VectorXd& x);

/// Minibatch SGD where each minibatch mean gradient is L2-clipped to 1.0 and
/// perturbed with per-coordinate Gaussian noise of std
/// sqrt(2*ln(1.25/1e-5))/epsilon. Same shuffle stream as train(), so the
/// epsilon -> infinity limit reproduces a plain SGD run whenever clipping
/// never binds.
ModelParams dp_train(ModelParams model, const LabeledDataset& data,
                     const TrainConfig& cfg, double epsilon);

/// The label-free drift-detection loop: ensemble prediction, per-instance
/// predictive entropy into ADWIN, and on drift a chunk-label request, FIFO
/// window update, full ensemble rebuild and detector reset.
RunResult run_ipdd(const LabeledDataset& ds, const StreamConfig& cfg);

/// Comparison pipelines sharing the same chunked evaluation loop.
RunResult run_baseline(const Method& method, const LabeledDataset& ds,
                       const StreamConfig& cfg);

}  // namespace ipdd
