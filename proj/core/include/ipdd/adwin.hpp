#pragma once

#include <cstdint>
#include <deque>
#include <vector>

namespace ipdd {

/// Adaptive-windowing change detector over a real-valued stream, backed by
/// an exponential histogram. The window is summarized by rows of buckets;
/// row r holds buckets covering 2^r elements each, at most kMaxBucketsPerRow
/// per row before the two oldest are merged one row up. After every insert,
/// all bucket-boundary splits W = W0 . W1 are tested and the oldest bucket
/// is dropped while any split has |mean(W0) - mean(W1)| >= eps_cut, with
///
///   eps_cut = sqrt(ln(4/delta') / (2*m)),  m = 1 / (1/|W0| + 1/|W1|),
///   delta'  = delta / width.
class Adwin {
 public:
  static constexpr int kMaxBucketsPerRow = 5;

  /// delta must lie in (0, 1).
  explicit Adwin(double delta);

  struct Update {
    bool drift = false;
    int dropped = 0;
  };

  /// Inserts x, runs the cut test to fixpoint. Throws on non-finite input.
  Update update(double x);

  int width() const { return width_; }
  /// Mean of the current window; 0 for an empty window.
  double mean() const { return width_ == 0 ? 0.0 : sum_ / width_; }
  double delta() const { return delta_; }
  std::int64_t total_seen() const { return total_seen_; }

  /// Bucket count per row, newest row first. Exposed for invariant checks.
  std::vector<int> row_occupancy() const;

 private:
  struct Bucket {
    double sum = 0.0;
    double variance = 0.0;  // sum of squared deviations within the bucket
  };

  void insert_element(double x);
  void drop_oldest_bucket();
  bool try_cut();

  double delta_;
  // rows_[r] holds buckets of 2^r elements; front = newest, back = oldest.
  std::vector<std::deque<Bucket>> rows_;
  int width_ = 0;
  double sum_ = 0.0;
  std::int64_t total_seen_ = 0;
};

}  // namespace ipdd
