#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qks/core.hpp"
#include "qks/estimator.hpp"
#include "qks/oracle.hpp"
#include "qks/random.hpp"

namespace qks {

enum class Preset {
  /// tau = ceil(2/eps'), rho = ceil(k/eps'^4). Carries the approximation
  /// guarantee; the candidate list is astronomically large for any real input.
  paper,
  /// tau = ceil(1/eps), rho = 2k. No guarantee, but the list stays tractable
  /// for N <= 20 and k <= 2.
  desk,
};

const char* to_string(Preset preset) noexcept;
Preset parse_preset(const std::string& name);

inline constexpr std::uint64_t kDefaultListCap = 10'000'000;

struct SchemeParams {
  std::size_t k = 1;
  double eps = 0.5;
  /// Working error eps' = eps / 4, so that (1 + eps')^3 <= 1 + eps.
  double eps_prime = 0.125;
  std::uint64_t rho = 1;
  std::uint64_t tau = 1;
  std::uint64_t repetitions = 1;
  Preset preset = Preset::desk;
  std::uint64_t list_cap = kDefaultListCap;

  static SchemeParams paper(std::size_t k, double eps);
  static SchemeParams desk(std::size_t k, double eps);
  static SchemeParams from_preset(Preset preset, std::size_t k, double eps);

  /// Default outer-loop count: min(2^k, 32).
  static std::uint64_t default_repetitions(std::size_t k);

  /// rho scaled by ceil(1 / (1 - delta)) under a deterministic-delta oracle.
  std::uint64_t effective_rho(const OracleConfig& oracle) const;

  void validate() const;
};

std::uint64_t binomial_coefficient(std::uint64_t n, std::uint64_t r);

/// prod_{i<k} C(n - i*tau, tau), saturating at UINT64_MAX. Zero when k*tau > n.
std::uint64_t count_disjoint_tuples(std::uint64_t n, std::uint64_t k, std::uint64_t tau);

/// Calls visit(members) for every ordered k-tuple of pairwise disjoint
/// tau-subsets of {0, ..., n-1}. `members` holds k*tau indices: subset 0 in
/// increasing order, then subset 1, and so on. Order is lexicographic in
/// (S_1, ..., S_k). Visits nothing when k*tau > n.
template <typename Visitor>
void enumerate_disjoint_tuples(std::size_t n, std::size_t k, std::size_t tau, Visitor&& visit);

/// Where an element of the sampled multiset M came from.
struct MultisetElement {
  enum class Origin { sampled, center_copy };
  Origin origin;
  /// Dataset index for sampled points, center index for copies.
  std::size_t source;
  /// Copy number for center copies (0 for sampled points).
  std::size_t copy;
};

struct CandidateProvenance {
  std::size_t repetition;
  /// k*tau indices into that repetition's multiset.
  std::span<const std::uint32_t> members;
};

struct CandidateList {
  CandidateList(std::size_t k, std::size_t dim, std::size_t tau) : sets(k, dim), tau(tau) {}

  CenterSetList sets;
  std::size_t tau;
  /// Multiset M of each repetition, with coordinates.
  std::vector<std::vector<MultisetElement>> multisets;
  std::vector<std::vector<Point>> multiset_points;
  std::vector<std::uint32_t> repetition_of;
  std::vector<std::uint32_t> members;
  /// Rejection-sampler proposals spent drawing the multisets.
  std::uint64_t proposals = 0;

  std::size_t size() const noexcept { return sets.size(); }
  CandidateProvenance provenance(std::size_t l) const;
};

/// Closed-form list size R * prod C(|M| - i tau, tau) with |M| = rho k + tau k |C|.
std::uint64_t expected_list_size(const SchemeParams& params, const OracleConfig& oracle,
                                 std::size_t num_centers);

/// Appends one candidate per disjoint tau-tuple of `points` (the centroids of
/// the k subsets) to `out`, tagged with `repetition`.
void append_candidates(std::span<const Point> points, std::size_t k, std::size_t tau,
                       std::size_t repetition, CandidateList& out);

/// Repeats R times: D^2-sample rho*k points w.r.t. `centers`, add tau*k copies
/// of every center, and enumerate all disjoint tau-tuples. Throws
/// Error(list_size_cap) before any work if the list would exceed the cap.
CandidateList build_candidate_list(const Dataset& data, const SchemeParams& params,
                                   const CenterSet& centers, const DistanceOracle& oracle, Rng& rng);

struct BruteForceLimits {
  /// Largest admissible Stirling number S(N, k) of the search space.
  double max_partitions = 2.0e7;
};

struct BruteForceResult {
  double cost = 0.0;
  CenterSet centers;
  std::vector<std::size_t> assignment;
  std::uint64_t leaves_visited = 0;
};

/// Stirling number of the second kind, as a double.
double stirling2(std::size_t n, std::size_t k);

/// Exact k-means optimum by branch-and-bound over partitions into k nonempty
/// blocks. Throws Error(brute_force_infeasible) above the limit.
BruteForceResult brute_force_opt(const Dataset& data, std::size_t k, BruteForceLimits limits = {});

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct SolveReport {
  SchemeParams params;
  std::uint64_t effective_rho = 0;
  std::uint64_t seed = 0;
  std::uint64_t seeding_stream = 0;
  std::uint64_t list_stream = 0;
  std::uint64_t selection_stream = 0;

  std::vector<std::size_t> seed_indices;
  double seed_cost = 0.0;
  std::uint64_t seeding_proposals = 0;

  std::uint64_t multiset_size = 0;
  std::uint64_t list_size = 0;
  std::uint64_t distinct_list_size = 0;
  std::uint64_t list_proposals = 0;
  /// min over the list of exact_cost.
  double best_list_cost = 0.0;

  std::uint64_t m = 0;
  std::size_t selected_index = 0;
  double selected_estimate = 0.0;
  double final_cost = 0.0;
  std::vector<CostEstimate> candidate_estimates;
  /// Candidate l was estimated on the stream derive_seed(candidate_stream_seed, l).
  std::uint64_t candidate_stream_seed = 0;

  std::uint64_t seeding_queries = 0;
  std::uint64_t list_queries = 0;
  std::uint64_t selection_queries = 0;
  /// L * m * k: distance estimates the sampled selection stands for.
  double modeled_selection_queries = 0.0;

  std::vector<StageTiming> timings;
};

struct SolveResult {
  CenterSet centers;
  SolveReport report;
};

/// Seeds 2k centers, builds the candidate list at eps', and returns the
/// candidate with the least estimated cost. Errors are rethrown with the
/// failing stage named in the message.
SolveResult solve(const Dataset& data, const SchemeParams& params, const OracleConfig& oracle,
                  std::uint64_t seed);
SolveResult solve(const Dataset& data, std::size_t k, double eps, const OracleConfig& oracle,
                  std::uint64_t seed);

// ---------------------------------------------------------------------------

namespace detail {

template <typename Visitor>
class TupleEnumerator {
 public:
  TupleEnumerator(std::size_t n, std::size_t k, std::size_t tau, Visitor& visit)
      : n_(n), k_(k), tau_(tau), visit_(visit), used_(n, false), members_(k * tau) {}

  void run() { fill(0, 0, 0); }

 private:
  void fill(std::size_t slot, std::size_t pos, std::size_t start) {
    if (slot == k_) {
      visit_(std::span<const std::size_t>(members_));
      return;
    }
    if (pos == tau_) {
      fill(slot + 1, 0, 0);
      return;
    }
    for (std::size_t i = start; i < n_; ++i) {
      if (used_[i]) continue;
      used_[i] = true;
      members_[slot * tau_ + pos] = i;
      fill(slot, pos + 1, i + 1);
      used_[i] = false;
    }
  }

  std::size_t n_, k_, tau_;
  Visitor& visit_;
  std::vector<bool> used_;
  std::vector<std::size_t> members_;
};

}  // namespace detail

template <typename Visitor>
void enumerate_disjoint_tuples(std::size_t n, std::size_t k, std::size_t tau, Visitor&& visit) {
  if (k == 0 || tau == 0 || k * tau > n) return;
  detail::TupleEnumerator<std::remove_reference_t<Visitor>> e(n, k, tau, visit);
  e.run();
}

}  // namespace qks
