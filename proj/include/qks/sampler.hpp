#pragma once

#include <cstdint>
#include <vector>

#include "qks/core.hpp"
#include "qks/oracle.hpp"
#include "qks/random.hpp"
#include "qks/weight_tree.hpp"

namespace qks {

/// probs[i] proportional to the squared estimated distance from point i to
/// its nearest center (uniform when there are no centers).
struct D2Distribution {
  std::vector<double> probs;
  OracleMode source = OracleMode::exact;
};

D2Distribution d2_distribution(const Dataset& data, CenterSetView centers,
                               const DistanceOracle& oracle, Rng& rng);

inline constexpr std::uint64_t kMaxProposals = 10'000'000;

struct RejectionDraw {
  std::size_t index = 0;
  std::uint64_t proposals = 0;
};

/// Proposes i uniformly and accepts with probability
/// est_i^2 / (2 * cost_estimate), repeating until acceptance. Function
/// oracles are queried once per point per call (cached estimates); a
/// stochastic oracle is re-queried on every proposal.
///
/// Throws Error(invalid_amplitude) if some est_i^2 exceeds cost_estimate, and
/// Error(sampler_starvation) after `max_proposals` rejections.
RejectionDraw d2_sample_rejection(const Dataset& data, CenterSetView centers,
                                  const DistanceOracle& oracle, double cost_estimate, Rng& rng,
                                  std::uint64_t max_proposals = kMaxProposals);

/// Direct D^2 draw through a WeightTree over the estimated weights.
std::size_t d2_sample_tree(const Dataset& data, CenterSetView centers,
                           const DistanceOracle& oracle, Rng& rng);

/// Cost value handed to the rejection sampler. Exact oracles use exact_cost;
/// otherwise the sampled estimate, floored at eta_tilde^2 so that no single
/// estimate can exceed it.
double rejection_cost_estimate(const Dataset& data, CenterSetView centers,
                               const DistanceOracle& oracle, Rng& rng);

struct SeedResult {
  CenterSet centers;
  std::vector<std::size_t> indices;
  std::uint64_t proposals = 0;
};

/// 2k rounds of D^2 sampling from an initially empty center set; the first
/// pick is uniform. Returns the 2k chosen data points (repeats allowed).
SeedResult pseudo_approx_seed(const Dataset& data, std::size_t k, const DistanceOracle& oracle,
                              Rng& rng);

}  // namespace qks
