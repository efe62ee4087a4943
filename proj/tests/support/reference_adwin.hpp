#pragma once

#include <cmath>
#include <deque>

namespace ipdd::testing {

/// Exact-window ADWIN oracle: keeps every element, tests every split point
/// with the same cut threshold as the production detector, and drops one
/// oldest element at a time until no split violates. Deliberately O(W) per
/// insertion; exists only to check the exponential-histogram detector.
class ReferenceAdwin {
 public:
  explicit ReferenceAdwin(double delta) : delta_(delta) {}

  struct Update {
    bool drift = false;
    int dropped = 0;
  };

  Update update(double x) {
    window_.push_back(x);
    sum_ += x;
    Update result;
    while (violating_split_exists()) {
      sum_ -= window_.front();
      window_.pop_front();
      ++result.dropped;
    }
    result.drift = result.dropped > 0;
    return result;
  }

  int width() const { return static_cast<int>(window_.size()); }
  double mean() const { return window_.empty() ? 0.0 : sum_ / window_.size(); }

 private:
  bool violating_split_exists() const {
    const std::size_t w = window_.size();
    if (w < 2) return false;
    const double delta_prime = delta_ / static_cast<double>(w);
    const double log_term = std::log(4.0 / delta_prime);
    double sum0 = 0.0;
    for (std::size_t n0 = 1; n0 < w; ++n0) {
      sum0 += window_[n0 - 1];
      const double n1 = static_cast<double>(w - n0);
      const double harmonic = 1.0 / (1.0 / static_cast<double>(n0) + 1.0 / n1);
      const double eps_cut = std::sqrt(log_term / (2.0 * harmonic));
      const double mean0 = sum0 / static_cast<double>(n0);
      const double mean1 = (sum_ - sum0) / n1;
      if (std::abs(mean0 - mean1) >= eps_cut) return true;
    }
    return false;
  }

  double delta_;
  std::deque<double> window_;
  double sum_ = 0.0;
};

}  // namespace ipdd::testing
