#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qks/core.hpp"
#include "qks/random.hpp"

namespace qks {

class Dataset;

enum class OracleMode {
  /// True Euclidean distance.
  exact,
  /// A fixed function of the point pair whose ratio to the truth lies in
  /// [1 - delta, 1 + delta].
  deterministic_delta,
  /// Fresh relative error in [1 - eps, 1 + eps] on every query, plus an
  /// independent failure event of probability 2 * delta_fail.
  stochastic,
};

const char* to_string(OracleMode mode) noexcept;
OracleMode parse_oracle_mode(const std::string& name);

struct OracleConfig {
  OracleMode mode = OracleMode::exact;
  /// Relative error bound. Doubles as delta in deterministic-delta mode.
  double eps_rel = 0.0;
  /// Per-estimate failure parameter; an estimate fails with probability 2x this.
  double delta_fail = 0.0;
  /// Keys the multiplier hash in deterministic-delta mode.
  std::uint64_t oracle_seed = 0;

  static OracleConfig exact() { return {}; }
  static OracleConfig deterministic_delta(double delta, std::uint64_t seed = 0) {
    return {OracleMode::deterministic_delta, delta, 0.0, seed};
  }
  static OracleConfig stochastic(double eps_rel, double delta_fail, std::uint64_t seed = 0) {
    return {OracleMode::stochastic, eps_rel, delta_fail, seed};
  }

  /// Throws Error(config_error) when a field is out of range.
  void validate() const;
};

struct DistanceEstimate {
  double value = 0.0;
  /// Set when the failure event fired; value is then garbage in [1, (1+eps) eta].
  bool failed = false;
};

/// Distance-estimation channel. Immutable after construction apart from the
/// atomic query counter; callers supply the random stream.
class DistanceOracle {
 public:
  /// Replaces the hashed multiplier of deterministic-delta mode. Values must
  /// stay inside [1 - delta, 1 + delta].
  using MultiplierFn = std::function<double(PointView, PointView)>;

  DistanceOracle(OracleConfig config, double eta);
  DistanceOracle(OracleConfig config, double eta, MultiplierFn multiplier);
  DistanceOracle(const DistanceOracle& other);
  DistanceOracle& operator=(const DistanceOracle&) = delete;

  const OracleConfig& config() const noexcept { return config_; }
  OracleMode mode() const noexcept { return config_.mode; }
  /// Exact and deterministic-delta oracles are functions of the pair.
  bool is_function() const noexcept { return config_.mode != OracleMode::stochastic; }
  double eta() const noexcept { return eta_; }
  /// Upper bound on any estimate: (1 + eps_rel) * eta.
  double eta_tilde() const noexcept { return (1.0 + config_.eps_rel) * eta_; }

  /// Multiplier applied to the pair in deterministic-delta mode (1 otherwise).
  double multiplier(PointView p, PointView q) const;

  DistanceEstimate estimate(PointView p, PointView q, Rng& rng) const;

  std::uint64_t queries() const noexcept { return queries_.load(std::memory_order_relaxed); }

 private:
  OracleConfig config_;
  double eta_;
  MultiplierFn override_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

DistanceEstimate estimate_distance(PointView p, PointView q, const DistanceOracle& oracle, Rng& rng);

/// One estimate per center, minimum over the estimated values. The result is
/// flagged failed if any per-center estimate failed.
DistanceEstimate estimate_min_distance(PointView p, CenterSetView centers,
                                       const DistanceOracle& oracle, Rng& rng);

struct DistanceProfile {
  std::vector<DistanceEstimate> estimates;
  bool all_succeeded = true;
  /// Modeled probability that every entry is a success: (1 - 2 delta_fail)^(N t).
  double success_probability = 1.0;
};

DistanceProfile min_distance_profile(const Dataset& data, CenterSetView centers,
                                     const DistanceOracle& oracle, Rng& rng);

}  // namespace qks
