#include "ipdd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ipdd {

ConfusionMatrix::ConfusionMatrix(int num_classes) : c_(num_classes) {
  if (c_ < 1) throw std::invalid_argument("confusion matrix: need >= 1 class");
  counts_.assign(static_cast<std::size_t>(c_) * c_, 0);
}

ConfusionMatrix::ConfusionMatrix(std::span<const int> truth,
                                 std::span<const int> predicted, int num_classes)
    : ConfusionMatrix(num_classes) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("confusion matrix: length mismatch");
  for (std::size_t i = 0; i < truth.size(); ++i) add(truth[i], predicted[i]);
}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || truth >= c_ || predicted < 0 || predicted >= c_)
    throw std::invalid_argument("confusion matrix: class id out of range");
  ++counts_[static_cast<std::size_t>(truth) * c_ + predicted];
  ++total_;
}

std::int64_t ConfusionMatrix::at(int truth, int predicted) const {
  return counts_[static_cast<std::size_t>(truth) * c_ + predicted];
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) throw std::invalid_argument("accuracy: empty input");
  if (truth.size() != predicted.size())
    throw std::invalid_argument("accuracy: length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double mcc(const ConfusionMatrix& cm) {
  const int c = cm.num_classes();
  const double n = static_cast<double>(cm.total());
  if (n == 0.0) throw std::invalid_argument("mcc: empty confusion matrix");

  // Gorodkin's multiclass form on relative frequencies.
  double trace = 0.0;
  std::vector<double> row_marginal(static_cast<std::size_t>(c), 0.0);
  std::vector<double> col_marginal(static_cast<std::size_t>(c), 0.0);
  for (int t = 0; t < c; ++t)
    for (int p = 0; p < c; ++p) {
      const double s = static_cast<double>(cm.at(t, p)) / n;
      if (t == p) trace += s;
      row_marginal[static_cast<std::size_t>(t)] += s;
      col_marginal[static_cast<std::size_t>(p)] += s;
    }

  double cross = 0.0;
  double row_sq = 0.0;
  double col_sq = 0.0;
  for (int k = 0; k < c; ++k) {
    cross += row_marginal[static_cast<std::size_t>(k)] * col_marginal[static_cast<std::size_t>(k)];
    row_sq += row_marginal[static_cast<std::size_t>(k)] * row_marginal[static_cast<std::size_t>(k)];
    col_sq += col_marginal[static_cast<std::size_t>(k)] * col_marginal[static_cast<std::size_t>(k)];
  }

  const double var_true = 1.0 - row_sq;
  const double var_pred = 1.0 - col_sq;
  if (var_true <= 0.0 || var_pred <= 0.0) return 0.0;
  return (trace - cross) / std::sqrt(var_true * var_pred);
}

double auc_binary(std::span<const int> truth, std::span<const double> scores) {
  if (truth.size() != scores.size())
    throw std::invalid_argument("auc: length mismatch");
  const std::size_t n = truth.size();
  std::size_t positives = 0;
  for (const int t : truth) {
    if (t != 0 && t != 1) throw std::invalid_argument("auc: labels must be 0/1");
    positives += static_cast<std::size_t>(t);
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument("auc: undefined, a class is absent");

  // Rank form with average ranks on ties. Ranks are half-integers, so the
  // sum is exact in doubles and matches brute-force pair counting bit for
  // bit on modest inputs.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      if (truth[order[k]] == 1) positive_rank_sum += avg_rank;
    i = j + 1;
  }

  const double u = positive_rank_sum -
                   static_cast<double>(positives) * (static_cast<double>(positives) + 1.0) / 2.0;
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double auc_macro_ovr(std::span<const int> truth, const Eigen::MatrixXd& scores) {
  if (static_cast<std::size_t>(scores.rows()) != truth.size())
    throw std::invalid_argument("auc: score rows must match labels");
  const int c = static_cast<int>(scores.cols());
  if (c == 2) {
    std::vector<double> pos(scores.col(1).data(), scores.col(1).data() + scores.rows());
    return auc_binary(truth, pos);
  }

  double sum = 0.0;
  int contributing = 0;
  std::vector<int> ovr(truth.size());
  std::vector<double> col(truth.size());
  for (int k = 0; k < c; ++k) {
    std::size_t positives = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      ovr[i] = truth[i] == k ? 1 : 0;
      col[i] = scores(static_cast<Eigen::Index>(i), k);
      positives += static_cast<std::size_t>(ovr[i]);
    }
    if (positives == 0 || positives == truth.size()) continue;
    sum += auc_binary(ovr, col);
    ++contributing;
  }
  if (contributing == 0)
    throw std::invalid_argument("auc: undefined, no one-vs-rest split has both classes");
  return sum / contributing;
}

DriftAccounting drift_accounting(std::span<const int> detected_chunks,
                                 std::span<const int> injected_chunks,
                                 int tolerance_chunks) {
  if (tolerance_chunks < 0) throw std::invalid_argument("drift_accounting: tolerance < 0");
  DriftAccounting out;
  out.detected = static_cast<int>(detected_chunks.size());

  std::vector<bool> used(detected_chunks.size(), false);
  double delay_sum = 0.0;
  for (const int inj : injected_chunks) {
    int best = -1;
    int best_dist = tolerance_chunks + 1;
    for (std::size_t i = 0; i < detected_chunks.size(); ++i) {
      if (used[i]) continue;
      const int dist = std::abs(detected_chunks[i] - inj);
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      ++out.matched;
      delay_sum += detected_chunks[static_cast<std::size_t>(best)] - inj;
    }
  }
  out.false_alarms = out.detected - out.matched;
  out.mean_delay_chunks = out.matched > 0 ? delay_sum / out.matched : 0.0;
  return out;
}

}  // namespace ipdd
