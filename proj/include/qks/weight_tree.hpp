#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qks/random.hpp"

namespace qks {

/// Complete binary tree of subtree weight sums over N nonnegative leaves,
/// padded to a power of two. Classical stand-in for sample-and-query access:
/// O(N) build, O(log N) point update and weighted sample.
class WeightTree {
 public:
  explicit WeightTree(std::span<const double> weights);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  double total() const noexcept { return nodes_[1]; }
  double weight(std::size_t i) const;

  void update(std::size_t i, double w);

  /// Draws index i with probability weight(i) / total() by descending from the
  /// root on a single uniform draw. Throws Error(empty_distribution) if the
  /// total weight is zero.
  std::size_t sample(Rng& rng) const;

  /// Product of child/parent ratios along the root-to-leaf path.
  double leaf_probability(std::size_t i) const;

  /// Stored sum of node `node` in heap order (root is 1, leaves start at capacity()).
  double node_sum(std::size_t node) const { return nodes_.at(node); }

 private:
  std::size_t size_;
  std::size_t capacity_;
  std::vector<double> nodes_;
};

}  // namespace qks
