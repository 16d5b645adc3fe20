#include "qks/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qks/error.hpp"
#include "qks/estimator.hpp"

namespace qks {

namespace {

std::vector<double> squared_estimates(const Dataset& data, CenterSetView centers,
                                      const DistanceOracle& oracle, Rng& rng) {
  const auto profile = min_distance_profile(data, centers, oracle, rng);
  std::vector<double> w;
  w.reserve(profile.estimates.size());
  for (const auto& e : profile.estimates) w.push_back(e.value * e.value);
  return w;
}

[[noreturn]] void throw_invalid_amplitude() {
  throw Error(ErrorCode::invalid_amplitude,
              "invalid amplitude: beta_i^2 > 1/2 analog (cost estimate below a squared distance)");
}

[[noreturn]] void throw_starvation(std::uint64_t proposals) {
  throw Error(ErrorCode::sampler_starvation,
              "sampler starvation: no acceptance in " + std::to_string(proposals) + " proposals");
}

}  // namespace

D2Distribution d2_distribution(const Dataset& data, CenterSetView centers,
                               const DistanceOracle& oracle, Rng& rng) {
  D2Distribution out;
  out.source = oracle.mode();
  const auto n = data.size();
  if (centers.empty()) {
    out.probs.assign(n, 1.0 / static_cast<double>(n));
    return out;
  }
  auto w = squared_estimates(data, centers, oracle, rng);
  CompensatedSum total;
  for (double x : w) total.add(x);
  if (!(total.value() > 0.0)) {
    throw Error(ErrorCode::degenerate_dataset, "degenerate: all points coincide with centers");
  }
  for (double& x : w) x /= total.value();
  out.probs = std::move(w);
  return out;
}

RejectionDraw d2_sample_rejection(const Dataset& data, CenterSetView centers,
                                  const DistanceOracle& oracle, double cost_estimate, Rng& rng,
                                  std::uint64_t max_proposals) {
  const auto n = data.size();
  if (centers.empty()) return {static_cast<std::size_t>(rng.index(n)), 1};
  require(std::isfinite(cost_estimate) && cost_estimate > 0.0, "cost estimate must be positive");
  const double denom = 2.0 * cost_estimate;

  if (oracle.is_function()) {
    const auto w = squared_estimates(data, centers, oracle, rng);
    if (std::any_of(w.begin(), w.end(), [&](double x) { return x > cost_estimate; })) {
      throw_invalid_amplitude();
    }
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) throw_starvation(0);
    for (std::uint64_t proposals = 1; proposals <= max_proposals; ++proposals) {
      const auto i = rng.index(n);
      if (rng.uniform() < w[i] / denom) return {static_cast<std::size_t>(i), proposals};
    }
  } else {
    for (std::uint64_t proposals = 1; proposals <= max_proposals; ++proposals) {
      const auto i = rng.index(n);
      const double x = estimate_min_distance(data.point(i), centers, oracle, rng).value;
      const double w = x * x;
      if (w > cost_estimate) throw_invalid_amplitude();
      if (rng.uniform() < w / denom) return {static_cast<std::size_t>(i), proposals};
    }
  }
  throw_starvation(max_proposals);
}

std::size_t d2_sample_tree(const Dataset& data, CenterSetView centers,
                           const DistanceOracle& oracle, Rng& rng) {
  if (centers.empty()) return static_cast<std::size_t>(rng.index(data.size()));
  const WeightTree tree(squared_estimates(data, centers, oracle, rng));
  return tree.sample(rng);
}

double rejection_cost_estimate(const Dataset& data, CenterSetView centers,
                               const DistanceOracle& oracle, Rng& rng) {
  if (oracle.mode() == OracleMode::exact) return exact_cost(data, centers);
  const auto m = sample_count_m(oracle.eta_tilde(), 1, 0.5);
  const double alpha = estimate_cost(data, centers, m, oracle, rng).alpha_m;
  const double ceiling = oracle.eta_tilde() * oracle.eta_tilde();
  return std::max(alpha, ceiling);
}

SeedResult pseudo_approx_seed(const Dataset& data, std::size_t k, const DistanceOracle& oracle,
                              Rng& rng) {
  require(k >= 1, "k must be positive");
  SeedResult out;
  out.centers = CenterSet(data.dim());
  for (std::size_t round = 0; round < 2 * k; ++round) {
    RejectionDraw draw;
    if (out.centers.empty() || exact_cost(data, out.centers) == 0.0) {
      // D^2 is undefined once every point sits on a center; fall back to uniform.
      draw = d2_sample_rejection(data, CenterSetView{}, oracle, 1.0, rng);
    } else {
      const double cost = rejection_cost_estimate(data, out.centers, oracle, rng);
      draw = d2_sample_rejection(data, out.centers, oracle, cost, rng);
    }
    out.proposals += draw.proposals;
    out.indices.push_back(draw.index);
    out.centers.push_back(data.point(draw.index));
  }
  return out;
}

}  // namespace qks
