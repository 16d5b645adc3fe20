#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qks/error.hpp"
#include "qks/scheme.hpp"

namespace qks {

double stirling2(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  // row[j] = S(i, j), built up one i at a time.
  std::vector<double> row(k + 1, 0.0);
  row[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = std::min(i, k); j >= 1; --j) {
      row[j] = static_cast<double>(j) * row[j] + row[j - 1];
    }
    row[0] = 0.0;
  }
  return row[k];
}

namespace {

struct Block {
  std::size_t count = 0;
  std::vector<double> mean;
  double sse = 0.0;
};

class PartitionSearch {
 public:
  PartitionSearch(const Dataset& data, std::size_t k)
      : data_(data), k_(k), blocks_(k), labels_(data.size(), 0) {
    for (auto& b : blocks_) b.mean.assign(data.dim(), 0.0);
  }

  void run() { assign(0, 0, 0.0); }

  double best_cost() const { return best_cost_; }
  const std::vector<std::size_t>& best_labels() const { return best_labels_; }
  std::uint64_t leaves() const { return leaves_; }

 private:
  void assign(std::size_t i, std::size_t used, double partial) {
    if (partial >= best_cost_) return;  // adding points never lowers a block's SSE
    const std::size_t n = data_.size();
    if (i == n) {
      ++leaves_;
      best_cost_ = partial;
      best_labels_ = labels_;
      return;
    }
    const auto x = data_.point(i);
    // Points left must still be able to open the blocks not yet used.
    const std::size_t open_limit = (n - i > k_ - used) ? used : 0;
    for (std::size_t b = 0; b < open_limit; ++b) place(i, b, used, partial, x);
    if (used < k_) place(i, used, used + 1, partial, x);
  }

  void place(std::size_t i, std::size_t b, std::size_t used, double partial, PointView x) {
    Block& block = blocks_[b];
    const Block saved = block;
    // Welford update of the block mean and sum of squared deviations.
    const double n_old = static_cast<double>(block.count);
    double d2 = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double diff = x[c] - block.mean[c];
      d2 += diff * diff;
      block.mean[c] += diff / (n_old + 1.0);
    }
    const double added = n_old / (n_old + 1.0) * d2;
    block.sse += added;
    block.count += 1;
    labels_[i] = b;
    assign(i + 1, used, partial + added);
    block = saved;
  }

  const Dataset& data_;
  std::size_t k_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> best_labels_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  std::uint64_t leaves_ = 0;
};

}  // namespace

BruteForceResult brute_force_opt(const Dataset& data, std::size_t k, BruteForceLimits limits) {
  require(k >= 1, "k must be positive");
  require(k <= data.size(), "k exceeds the number of points");
  const double space = stirling2(data.size(), k);
  if (space > limits.max_partitions) {
    throw Error(ErrorCode::brute_force_infeasible,
                "brute force infeasible: S(" + std::to_string(data.size()) + ", " + std::to_string(k) +
                    ") partitions exceeds the limit");
  }

  PartitionSearch search(data, k);
  search.run();

  BruteForceResult out;
  out.assignment = search.best_labels();
  out.leaves_visited = search.leaves();
  out.centers = CenterSet(data.dim());
  for (std::size_t b = 0; b < k; ++b) {
    std::vector<PointView> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (out.assignment[i] == b) members.push_back(data.point(i));
    }
    out.centers.push_back(centroid(std::span<const PointView>(members)));
  }
  // Centroid assignment can only match or beat the partition it came from.
  out.cost = exact_cost(data, out.centers);
  return out;
}

}  // namespace qks
