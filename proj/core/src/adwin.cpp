#include "ipdd/adwin.hpp"

#include <cmath>
#include <stdexcept>

namespace ipdd {

Adwin::Adwin(double delta) : delta_(delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("adwin: delta must lie in (0, 1)");
}

Adwin::Update Adwin::update(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("adwin: non-finite input");
  insert_element(x);
  ++total_seen_;

  Update result;
  while (try_cut()) {
    const int before = width_;
    drop_oldest_bucket();
    result.dropped += before - width_;
  }
  result.drift = result.dropped > 0;
  return result;
}

void Adwin::insert_element(double x) {
  if (rows_.empty()) rows_.emplace_back();
  rows_[0].push_front(Bucket{x, 0.0});
  width_ += 1;
  sum_ += x;

  // Cascade compression: merging the two oldest buckets of row r produces
  // one bucket of row r+1.
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (static_cast<int>(rows_[r].size()) <= kMaxBucketsPerRow) break;
    if (r + 1 == rows_.size()) rows_.emplace_back();
    const Bucket old1 = rows_[r].back();
    rows_[r].pop_back();
    const Bucket old2 = rows_[r].back();
    rows_[r].pop_back();

    const double cap = static_cast<double>(1 << r);
    const double mean1 = old1.sum / cap;
    const double mean2 = old2.sum / cap;
    Bucket merged;
    merged.sum = old1.sum + old2.sum;
    merged.variance = old1.variance + old2.variance +
                      (cap / 2.0) * (mean1 - mean2) * (mean1 - mean2);
    rows_[r + 1].push_front(merged);
  }
}

void Adwin::drop_oldest_bucket() {
  for (std::size_t r = rows_.size(); r-- > 0;) {
    if (rows_[r].empty()) continue;
    const Bucket oldest = rows_[r].back();
    rows_[r].pop_back();
    width_ -= 1 << r;
    sum_ -= oldest.sum;
    break;
  }
  while (!rows_.empty() && rows_.back().empty()) rows_.pop_back();
}

bool Adwin::try_cut() {
  if (width_ < 2) return false;
  const double delta_prime = delta_ / static_cast<double>(width_);
  const double log_term = std::log(4.0 / delta_prime);

  double n0 = 0.0;
  double sum0 = 0.0;
  // Walk splits from the oldest boundary towards the newest.
  for (std::size_t r = rows_.size(); r-- > 0;) {
    const double cap = static_cast<double>(1 << r);
    for (auto it = rows_[r].rbegin(); it != rows_[r].rend(); ++it) {
      n0 += cap;
      sum0 += it->sum;
      const double n1 = width_ - n0;
      if (n1 <= 0.0) break;
      const double harmonic = 1.0 / (1.0 / n0 + 1.0 / n1);
      const double eps_cut = std::sqrt(log_term / (2.0 * harmonic));
      const double diff = std::abs(sum0 / n0 - (sum_ - sum0) / n1);
      if (diff >= eps_cut) return true;
    }
  }
  return false;
}

std::vector<int> Adwin::row_occupancy() const {
  std::vector<int> counts;
  counts.reserve(rows_.size());
  for (const auto& row : rows_) counts.push_back(static_cast<int>(row.size()));
  return counts;
}

}  // namespace ipdd
