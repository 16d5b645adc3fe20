#include "qks/scheme.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "qks/error.hpp"
#include "qks/sampler.hpp"

namespace qks {

const char* to_string(Preset preset) noexcept {
  return preset == Preset::paper ? "paper" : "desk";
}

Preset parse_preset(const std::string& name) {
  if (name == "paper") return Preset::paper;
  if (name == "desk") return Preset::desk;
  throw Error(ErrorCode::config_error, "unknown preset '" + name + "'");
}

std::uint64_t SchemeParams::default_repetitions(std::size_t k) {
  return k >= 5 ? 32 : (std::uint64_t{1} << k);
}

SchemeParams SchemeParams::paper(std::size_t k, double eps) {
  SchemeParams p;
  p.k = k;
  p.eps = eps;
  p.eps_prime = eps / 4.0;
  p.tau = static_cast<std::uint64_t>(std::ceil(2.0 / p.eps_prime));
  p.rho = static_cast<std::uint64_t>(std::ceil(static_cast<double>(k) / std::pow(p.eps_prime, 4)));
  p.repetitions = default_repetitions(k);
  p.preset = Preset::paper;
  return p;
}

SchemeParams SchemeParams::desk(std::size_t k, double eps) {
  SchemeParams p;
  p.k = k;
  p.eps = eps;
  p.eps_prime = eps / 4.0;
  p.tau = static_cast<std::uint64_t>(std::ceil(1.0 / eps));
  p.rho = 2 * k;
  p.repetitions = default_repetitions(k);
  p.preset = Preset::desk;
  return p;
}

SchemeParams SchemeParams::from_preset(Preset preset, std::size_t k, double eps) {
  return preset == Preset::paper ? paper(k, eps) : desk(k, eps);
}

std::uint64_t SchemeParams::effective_rho(const OracleConfig& oracle) const {
  if (oracle.mode != OracleMode::deterministic_delta) return rho;
  // Slack absorbs rounding in 1/(1-delta), e.g. 1/(1-0.8) = 5.000000000000001.
  return rho * static_cast<std::uint64_t>(std::ceil(1.0 / (1.0 - oracle.eps_rel) - 1e-9));
}

void SchemeParams::validate() const {
  if (k < 1) throw Error(ErrorCode::config_error, "k must be positive");
  if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorCode::config_error, "eps must lie in (0, 1/2]");
  if (!(eps_prime > 0.0 && eps_prime <= eps)) {
    throw Error(ErrorCode::config_error, "eps' must lie in (0, eps]");
  }
  if (rho < 1 || tau < 1 || repetitions < 1) {
    throw Error(ErrorCode::config_error, "rho, tau and repetitions must be positive");
  }
}

std::uint64_t binomial_coefficient(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // acc * (n - r + i) / i stays integral at every step.
    acc = acc * (n - r + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t count_disjoint_tuples(std::uint64_t n, std::uint64_t k, std::uint64_t tau) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (k == 0 || tau == 0) return 0;
  if (tau > n / k) return 0;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto c = binomial_coefficient(n - i * tau, tau);
    if (c == kMax) return kMax;
    acc *= c;
    if (acc > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(acc);
}

CandidateProvenance CandidateList::provenance(std::size_t l) const {
  const std::size_t width = sets.k() * tau;
  return {repetition_of.at(l), std::span<const std::uint32_t>(members).subspan(l * width, width)};
}

std::uint64_t expected_list_size(const SchemeParams& params, const OracleConfig& oracle,
                                 std::size_t num_centers) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const unsigned __int128 multiset = static_cast<unsigned __int128>(params.effective_rho(oracle)) * params.k +
                                     static_cast<unsigned __int128>(params.tau) * params.k * num_centers;
  if (multiset > kMax) return kMax;
  const auto per_round = count_disjoint_tuples(static_cast<std::uint64_t>(multiset), params.k, params.tau);
  const unsigned __int128 total = static_cast<unsigned __int128>(per_round) * params.repetitions;
  return total > kMax ? kMax : static_cast<std::uint64_t>(total);
}

void append_candidates(std::span<const Point> points, std::size_t k, std::size_t tau,
                       std::size_t repetition, CandidateList& out) {
  require(!points.empty(), "empty multiset");
  const std::size_t dim = points.front().size();
  std::vector<double> tuple(k * dim);
  std::vector<PointView> subset(tau);
  enumerate_disjoint_tuples(points.size(), k, tau, [&](std::span<const std::size_t> members) {
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t j = 0; j < tau; ++j) subset[j] = points[members[s * tau + j]];
      const auto mu = centroid(std::span<const PointView>(subset));
      std::copy(mu.begin(), mu.end(), tuple.begin() + static_cast<std::ptrdiff_t>(s * dim));
    }
    out.sets.push_back(tuple);
    out.repetition_of.push_back(static_cast<std::uint32_t>(repetition));
    for (auto i : members) out.members.push_back(static_cast<std::uint32_t>(i));
  });
}

CandidateList build_candidate_list(const Dataset& data, const SchemeParams& params,
                                   const CenterSet& centers, const DistanceOracle& oracle, Rng& rng) {
  params.validate();
  require(!centers.empty(), "candidate generation needs a nonempty center set");
  require(centers.dim() == data.dim(), "dimension mismatch");

  const auto total = expected_list_size(params, oracle.config(), centers.size());
  if (total > params.list_cap) {
    throw Error(ErrorCode::list_size_cap,
                "candidate list would hold " +
                    (total == std::numeric_limits<std::uint64_t>::max() ? std::string("> 2^64")
                                                                        : std::to_string(total)) +
                    " entries (cap " + std::to_string(params.list_cap) + ")");
  }

  const std::uint64_t draws = params.effective_rho(oracle.config()) * params.k;
  const std::uint64_t copies = params.tau * params.k;

  CandidateList out(params.k, data.dim(), params.tau);
  out.sets.reserve(total);
  out.repetition_of.reserve(total);
  out.members.reserve(total * params.k * params.tau);

  const bool covered = exact_cost(data, centers) == 0.0;
  for (std::uint64_t r = 0; r < params.repetitions; ++r) {
    std::vector<MultisetElement> elements;
    std::vector<Point> points;
    const double cost = covered ? 1.0 : rejection_cost_estimate(data, centers, oracle, rng);
    for (std::uint64_t s = 0; s < draws; ++s) {
      // With every point on a center D^2 is undefined; sample uniformly then.
      const auto draw = d2_sample_rejection(data, covered ? CenterSetView{} : centers.view(), oracle, cost, rng);
      out.proposals += draw.proposals;
      elements.push_back({MultisetElement::Origin::sampled, draw.index, 0});
      const auto p = data.point(draw.index);
      points.emplace_back(p.begin(), p.end());
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const auto c = centers.center(j);
      for (std::uint64_t copy = 0; copy < copies; ++copy) {
        elements.push_back({MultisetElement::Origin::center_copy, j, copy});
        points.emplace_back(c.begin(), c.end());
      }
    }
    append_candidates(points, params.k, params.tau, r, out);
    out.multisets.push_back(std::move(elements));
    out.multiset_points.push_back(std::move(points));
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
auto run_stage(const char* stage, std::vector<StageTiming>& timings, Fn&& fn) {
  const auto start = Clock::now();
  try {
    auto result = fn();
    timings.push_back({stage, seconds_since(start)});
    return result;
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + stage + ": " + e.what());
  }
}

std::uint64_t count_distinct(const CenterSetList& sets) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(sets.size());
  std::vector<std::uint64_t> center_hashes(sets.k());
  for (std::size_t l = 0; l < sets.size(); ++l) {
    const auto view = sets[l];
    for (std::size_t j = 0; j < view.size(); ++j) {
      std::uint64_t h = 0x51afd7ed558ccd1dULL;
      for (double x : view.center(j)) h = mix64(h ^ std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x));
      center_hashes[j] = h;
    }
    std::sort(center_hashes.begin(), center_hashes.end());
    std::uint64_t h = 0;
    for (auto c : center_hashes) h = mix64(h ^ c);
    seen.insert(h);
  }
  return seen.size();
}

}  // namespace

SolveResult solve(const Dataset& data, const SchemeParams& params, const OracleConfig& config,
                  std::uint64_t seed) {
  params.validate();
  config.validate();
  const DistanceOracle oracle(config, data.eta());

  SolveReport report;
  report.params = params;
  report.effective_rho = params.effective_rho(config);
  report.seed = seed;
  report.seeding_stream = derive_seed(seed, 1);
  report.list_stream = derive_seed(seed, 2);
  report.selection_stream = derive_seed(seed, 3);

  auto queries_before = oracle.queries();
  auto seeded = run_stage("seeding", report.timings, [&] {
    Rng rng(report.seeding_stream);
    return pseudo_approx_seed(data, params.k, oracle, rng);
  });
  report.seed_indices = seeded.indices;
  report.seed_cost = exact_cost(data, seeded.centers);
  report.seeding_proposals = seeded.proposals;
  report.seeding_queries = oracle.queries() - queries_before;

  queries_before = oracle.queries();
  auto list = run_stage("candidates", report.timings, [&] {
    Rng rng(report.list_stream);
    return build_candidate_list(data, params, seeded.centers, oracle, rng);
  });
  report.list_queries = oracle.queries() - queries_before;
  report.list_size = list.size();
  report.multiset_size = list.multisets.empty() ? 0 : list.multisets.front().size();
  report.list_proposals = list.proposals;
  report.distinct_list_size = count_distinct(list.sets);

  queries_before = oracle.queries();
  auto selection = run_stage("selection", report.timings, [&] {
    Rng rng(report.selection_stream);
    return select_min_cost(data, list.sets, params.eps_prime, oracle, rng);
  });
  report.selection_queries = oracle.queries() - queries_before;
  report.m = selection.estimate.m;
  report.modeled_selection_queries = static_cast<double>(list.size()) * static_cast<double>(report.m) *
                                     static_cast<double>(params.k);
  report.selected_index = selection.index;
  report.selected_estimate = selection.estimate.alpha_m;
  report.candidate_estimates = std::move(selection.estimates);
  report.candidate_stream_seed = selection.stream_seed;

  const auto audit_start = Clock::now();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < list.size(); ++l) best = std::min(best, exact_cost(data, list.sets[l]));
  report.best_list_cost = best;
  report.timings.push_back({"audit", seconds_since(audit_start)});

  const auto winner = list.sets[selection.index];
  SolveResult out;
  out.centers = CenterSet(data.dim());
  for (std::size_t j = 0; j < winner.size(); ++j) out.centers.push_back(winner.center(j));
  report.final_cost = exact_cost(data, out.centers);
  out.report = std::move(report);
  return out;
}

SolveResult solve(const Dataset& data, std::size_t k, double eps, const OracleConfig& oracle,
                  std::uint64_t seed) {
  return solve(data, SchemeParams::desk(k, eps), oracle, seed);
}

}  // namespace qks
