#include "qks/weight_tree.hpp"

#include <bit>
#include <cmath>

#include "qks/error.hpp"

namespace qks {

namespace {

void check_weight(double w) {
  require(std::isfinite(w) && w >= 0.0, "weights must be finite and nonnegative");
}

}  // namespace

WeightTree::WeightTree(std::span<const double> weights)
    : size_(weights.size()), capacity_(std::bit_ceil(weights.size() == 0 ? 1 : weights.size())) {
  require(!weights.empty(), "weight tree needs at least one leaf");
  nodes_.assign(2 * capacity_, 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    check_weight(weights[i]);
    nodes_[capacity_ + i] = weights[i];
  }
  for (std::size_t node = capacity_ - 1; node >= 1; --node) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
}

double WeightTree::weight(std::size_t i) const {
  require(i < size_, "leaf index out of range");
  return nodes_[capacity_ + i];
}

void WeightTree::update(std::size_t i, double w) {
  require(i < size_, "leaf index out of range");
  check_weight(w);
  std::size_t node = capacity_ + i;
  nodes_[node] = w;
  // Recompute from children rather than adding a delta, so every internal node
  // is exactly the rounded sum of its children after any update sequence.
  for (node /= 2; node >= 1; node /= 2) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
}

std::size_t WeightTree::sample(Rng& rng) const {
  if (!(total() > 0.0)) throw Error(ErrorCode::empty_distribution, "empty distribution");
  double u = rng.uniform() * total();
  std::size_t node = 1;
  while (node < capacity_) {
    const double left = nodes_[2 * node];
    const double right = nodes_[2 * node + 1];
    if (right <= 0.0 || (left > 0.0 && u < left)) {
      node = 2 * node;
    } else {
      u -= left;
      node = 2 * node + 1;
    }
  }
  return node - capacity_;
}

double WeightTree::leaf_probability(std::size_t i) const {
  require(i < size_, "leaf index out of range");
  if (!(total() > 0.0)) throw Error(ErrorCode::empty_distribution, "empty distribution");
  double p = 1.0;
  for (std::size_t node = capacity_ + i; node > 1; node /= 2) {
    const double parent = nodes_[node / 2];
    if (parent <= 0.0) return 0.0;
    p *= nodes_[node] / parent;
  }
  return p;
}

}  // namespace qks
