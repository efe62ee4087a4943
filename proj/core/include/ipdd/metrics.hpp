#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace ipdd {

/// c x c contingency counts; rows index the true class, columns the
/// predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);
  ConfusionMatrix(std::span<const int> truth, std::span<const int> predicted,
                  int num_classes);

  void add(int truth, int predicted);
  std::int64_t at(int truth, int predicted) const;
  std::int64_t total() const { return total_; }
  int num_classes() const { return c_; }

 private:
  int c_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_;
};

/// Fraction of exact matches. Throws on empty or mismatched inputs.
double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// Multiclass Matthews correlation coefficient (Gorodkin form). Returns 0
/// when either marginal has zero variance.
double mcc(const ConfusionMatrix& cm);

/// Binary ROC AUC: probability that a random positive outranks a random
/// negative, ties counted 1/2 (rank / Mann-Whitney form). `scores` are
/// positive-class scores. Throws when either class is absent.
double auc_binary(std::span<const int> truth, std::span<const double> scores);

/// Macro one-vs-rest AUC. `scores` holds one column per class. Splits whose
/// positive or negative side is empty do not contribute; if no split
/// contributes the AUC is undefined and an exception is thrown.
double auc_macro_ovr(std::span<const int> truth, const Eigen::MatrixXd& scores);

struct DriftAccounting {
  int detected = 0;
  int matched = 0;
  int false_alarms = 0;
  double mean_delay_chunks = 0.0;
};

/// Matches detected drift chunks to injected ones: each injected index is
/// greedily paired with the nearest unmatched detection within
/// `tolerance_chunks`. Unmatched detections count as false alarms.
DriftAccounting drift_accounting(std::span<const int> detected_chunks,
                                 std::span<const int> injected_chunks,
                                 int tolerance_chunks);

/// Per-run evaluation summary in the shape the comparison tables use.
struct MetricsReport {
  double accuracy = 0.0;
  double mcc = 0.0;
  double auc = 0.0;
  int drift_count = 0;
  std::vector<double> chunk_accuracy;
  std::vector<double> chunk_mcc;
  std::vector<double> chunk_auc;  // NaN where a chunk leaves AUC undefined
};

}  // namespace ipdd
