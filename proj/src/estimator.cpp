#include "qks/estimator.hpp"

#include <cmath>

#include <boost/random/binomial_distribution.hpp>

#include "qks/error.hpp"

namespace qks {

std::uint64_t sample_count_m(double eta, std::uint64_t list_size, double eps) {
  require(eta >= 1.0, "eta must be at least 1");
  require(list_size >= 1, "list size must be positive");
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  const double m = std::ceil(eta * eta * std::log(10.0 * static_cast<double>(list_size)) / (eps * eps));
  if (!(m < 0x1.0p62)) throw Error(ErrorCode::config_error, "sample count overflows");
  return static_cast<std::uint64_t>(m);
}

double selection_failure_budget(std::uint64_t n, std::uint64_t k, std::uint64_t m,
                                std::uint64_t list_size) {
  require(n >= 1 && k >= 1 && m >= 1 && list_size >= 1, "arguments must be positive");
  return 1.0 / (static_cast<double>(n) * static_cast<double>(k) * static_cast<double>(m) *
                static_cast<double>(list_size));
}

CostEstimate estimate_cost(const Dataset& data, CenterSetView centers, std::uint64_t m,
                           const DistanceOracle& oracle, Rng& rng, CostSampling sampling) {
  require(!centers.empty(), "empty center set");
  CostEstimate out;
  out.m = m;
  out.eta_used = oracle.eta_tilde();
  if (m == 0) {
    out.alpha_m = exact_cost(data, centers);
    return out;
  }

  const std::uint64_t n = data.size();
  CompensatedSum sum;
  if (sampling == CostSampling::automatic && oracle.is_function()) {
    // Visit counts of m uniform draws are Multinomial(m; 1/N, ..., 1/N),
    // drawn here as a chain of conditional binomials.
    std::uint64_t remaining = m;
    for (std::uint64_t i = 0; i < n && remaining > 0; ++i) {
      std::uint64_t count = remaining;
      if (i + 1 < n) {
        boost::random::binomial_distribution<std::int64_t, double> draw(
            static_cast<std::int64_t>(remaining), 1.0 / static_cast<double>(n - i));
        count = static_cast<std::uint64_t>(draw(rng));
      }
      remaining -= count;
      if (count == 0) continue;
      const double x = estimate_min_distance(data.point(i), centers, oracle, rng).value;
      sum.add(static_cast<double>(count) * x * x);
    }
  } else {
    for (std::uint64_t j = 0; j < m; ++j) {
      const auto i = rng.index(n);
      const double x = estimate_min_distance(data.point(i), centers, oracle, rng).value;
      sum.add(x * x);
    }
  }
  out.alpha_m = sum.value() * static_cast<double>(n) / static_cast<double>(m);
  return out;
}

Selection select_min_cost(const Dataset& data, const CenterSetList& candidates, double eps,
                          const DistanceOracle& oracle, Rng& rng,
                          std::optional<std::uint64_t> m_override) {
  require(!candidates.empty(), "empty candidate list");
  const std::uint64_t list_size = candidates.size();
  const std::uint64_t m =
      m_override ? *m_override : sample_count_m(oracle.eta_tilde(), list_size, eps);

  Selection out;
  out.stream_seed = rng();
  out.estimates.reserve(candidates.size());
  for (std::size_t l = 0; l < candidates.size(); ++l) {
    Rng stream(derive_seed(out.stream_seed, l));
    auto est = estimate_cost(data, candidates[l], m, oracle, stream);
    est.list_size = list_size;
    if (l > 0 && est.alpha_m < out.estimates[out.index].alpha_m) out.index = l;
    out.estimates.push_back(est);
  }
  out.estimate = out.estimates[out.index];
  return out;
}

}  // namespace qks
