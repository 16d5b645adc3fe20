#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qks/core.hpp"
#include "qks/oracle.hpp"
#include "qks/random.hpp"

namespace qks {

struct CostEstimate {
  /// alpha_m = S_m * N / m, where S_m sums m squared min-distance estimates.
  double alpha_m = 0.0;
  /// Number of sampled points; 0 marks an exhaustive (exact_cost) evaluation.
  std::uint64_t m = 0;
  double eta_used = 1.0;
  std::uint64_t list_size = 1;
};

/// ceil(eta^2 * ln(10 L) / eps^2): enough samples that alpha_m lands in
/// (1 +- eps) of the estimated cost with probability at least 1 - 1/(5L).
std::uint64_t sample_count_m(double eta, std::uint64_t list_size, double eps);

/// Failure parameter 1 / (N k m L) that keeps the union bound over all
/// estimates in a list selection below 1/5.
double selection_failure_budget(std::uint64_t n, std::uint64_t k, std::uint64_t m,
                                std::uint64_t list_size);

enum class CostSampling {
  /// Per-draw when the oracle is stochastic. When the oracle is a function of
  /// the pair, draws multinomial visit counts over the N points instead, which
  /// has the same distribution as m uniform draws at O(N) cost.
  automatic,
  /// Always draw m uniform indices and query the oracle for each.
  per_draw,
};

/// Samples m uniform points, squares their estimated distance to the nearest
/// center and rescales. m == 0 returns exact_cost instead of sampling.
CostEstimate estimate_cost(const Dataset& data, CenterSetView centers, std::uint64_t m,
                           const DistanceOracle& oracle, Rng& rng,
                           CostSampling sampling = CostSampling::automatic);

struct Selection {
  std::size_t index = 0;
  CostEstimate estimate;
  /// One entry per candidate, in list order.
  std::vector<CostEstimate> estimates;
  /// Seed the per-candidate streams were derived from.
  std::uint64_t stream_seed = 0;
};

/// Estimates every candidate's cost with fresh samples and returns the
/// argmin, lowest index on ties. m defaults to
/// sample_count_m(eta_tilde, candidates.size(), eps); `m_override` replaces it
/// (0 selects on exact costs).
Selection select_min_cost(const Dataset& data, const CenterSetList& candidates, double eps,
                          const DistanceOracle& oracle, Rng& rng,
                          std::optional<std::uint64_t> m_override = std::nullopt);

}  // namespace qks
