#include "qks/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "qks/error.hpp"

namespace qks {

const char* to_string(OracleMode mode) noexcept {
  switch (mode) {
    case OracleMode::exact: return "exact";
    case OracleMode::deterministic_delta: return "deterministic-delta";
    case OracleMode::stochastic: return "stochastic";
  }
  return "unknown";
}

OracleMode parse_oracle_mode(const std::string& name) {
  if (name == "exact") return OracleMode::exact;
  if (name == "deterministic-delta") return OracleMode::deterministic_delta;
  if (name == "stochastic") return OracleMode::stochastic;
  throw Error(ErrorCode::config_error, "unknown oracle mode '" + name + "'");
}

void OracleConfig::validate() const {
  if (!(eps_rel >= 0.0 && eps_rel < 1.0)) {
    throw Error(ErrorCode::config_error, "eps_rel must lie in [0, 1)");
  }
  if (!(delta_fail >= 0.0 && delta_fail < 0.5)) {
    throw Error(ErrorCode::config_error, "delta_fail must lie in [0, 1/2)");
  }
}

namespace {

OracleConfig canonical(OracleConfig config) {
  config.validate();
  if (config.mode == OracleMode::exact) {
    config.eps_rel = 0.0;
    config.delta_fail = 0.0;
  } else if (config.mode == OracleMode::deterministic_delta) {
    config.delta_fail = 0.0;
  }
  return config;
}

std::uint64_t hash_point(PointView p, std::uint64_t seed) {
  std::uint64_t h = mix64(seed ^ p.size());
  for (double x : p) {
    if (x == 0.0) x = 0.0;  // fold -0.0 into +0.0
    h = mix64(h ^ std::bit_cast<std::uint64_t>(x));
  }
  return h;
}

}  // namespace

DistanceOracle::DistanceOracle(OracleConfig config, double eta)
    : config_(canonical(config)), eta_(eta) {
  require(eta >= 1.0, "aspect ratio must be at least 1");
}

DistanceOracle::DistanceOracle(OracleConfig config, double eta, MultiplierFn multiplier)
    : DistanceOracle(config, eta) {
  require(config_.mode == OracleMode::deterministic_delta,
          "multiplier override requires deterministic-delta mode");
  override_ = std::move(multiplier);
}

DistanceOracle::DistanceOracle(const DistanceOracle& other)
    : config_(other.config_), eta_(other.eta_), override_(other.override_), queries_(other.queries()) {}

double DistanceOracle::multiplier(PointView p, PointView q) const {
  if (config_.mode != OracleMode::deterministic_delta) return 1.0;
  const double delta = config_.eps_rel;
  if (override_) {
    const double m = override_(p, q);
    require(m >= 1.0 - delta && m <= 1.0 + delta, "multiplier override outside [1-delta, 1+delta]");
    return m;
  }
  // Symmetric in (p, q): the pair's hashes are combined in sorted order.
  auto a = hash_point(p, config_.oracle_seed);
  auto b = hash_point(q, config_.oracle_seed);
  if (a > b) std::swap(a, b);
  const double u = to_unit_interval(mix64(a ^ mix64(b ^ config_.oracle_seed)));
  return 1.0 - delta + 2.0 * delta * u;
}

DistanceEstimate DistanceOracle::estimate(PointView p, PointView q, Rng& rng) const {
  queries_.fetch_add(1, std::memory_order_relaxed);
  const double truth = euclidean_distance(p, q);
  switch (config_.mode) {
    case OracleMode::exact:
      return {truth, false};
    case OracleMode::deterministic_delta:
      return {truth * multiplier(p, q), false};
    case OracleMode::stochastic:
      break;
  }
  if (config_.delta_fail > 0.0 && rng.uniform() < 2.0 * config_.delta_fail) {
    return {rng.uniform(1.0, eta_tilde()), true};
  }
  const double eps = config_.eps_rel;
  return {truth * rng.uniform(1.0 - eps, 1.0 + eps), false};
}

DistanceEstimate estimate_distance(PointView p, PointView q, const DistanceOracle& oracle, Rng& rng) {
  return oracle.estimate(p, q, rng);
}

DistanceEstimate estimate_min_distance(PointView p, CenterSetView centers,
                                       const DistanceOracle& oracle, Rng& rng) {
  require(!centers.empty(), "empty center set");
  DistanceEstimate best{std::numeric_limits<double>::infinity(), false};
  bool any_failed = false;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const auto e = oracle.estimate(p, centers.center(j), rng);
    any_failed = any_failed || e.failed;
    best.value = std::min(best.value, e.value);
  }
  best.failed = any_failed;
  return best;
}

DistanceProfile min_distance_profile(const Dataset& data, CenterSetView centers,
                                     const DistanceOracle& oracle, Rng& rng) {
  DistanceProfile profile;
  profile.estimates.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    profile.estimates.push_back(estimate_min_distance(data.point(i), centers, oracle, rng));
    profile.all_succeeded = profile.all_succeeded && !profile.estimates.back().failed;
  }
  const double per_estimate = 1.0 - 2.0 * oracle.config().delta_fail;
  profile.success_probability =
      std::pow(per_estimate, static_cast<double>(data.size() * centers.size()));
  return profile;
}

}  // namespace qks
