#pragma once

#include <cstddef>
#include <vector>

namespace lwc {

// Binary indexed tree over nonnegative weights, supporting point updates and
// sampling an index with probability proportional to its weight.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n = 0) : tree_(n + 1, 0.0), weight_(n, 0.0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }

  std::size_t size() const { return weight_.size(); }
  double weight(std::size_t i) const { return weight_[i]; }
  double total() const { return total_; }

  void set(std::size_t i, double w) { add(i, w - weight_[i]); }

  void add(std::size_t i, double delta) {
    weight_[i] += delta;
    total_ += delta;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  /// Smallest index whose prefix sum exceeds `target`, for target in [0, total).
  std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    // Guard against round-off landing on a zero-weight slot.
    std::size_t i = pos < weight_.size() ? pos : weight_.size() - 1;
    while (weight_[i] <= 0.0 && i > 0) --i;
    return i;
  }

  template <class Rng>
  std::size_t sample(Rng& rng) const {
    return find(rng.uniform() * total_);
  }

 private:
  std::vector<double> tree_;
  std::vector<double> weight_;
  std::size_t top_ = 1;
  double total_ = 0.0;
};

}  // namespace lwc
