#include <doctest.h>

#include <cmath>

#include "qks/error.hpp"
#include "qks/estimator.hpp"
#include "test_support.hpp"

using namespace qks;

TEST_CASE("sample count") {
  CHECK(sample_count_m(2.0, 1, 0.5) == 37);
  CHECK(sample_count_m(1.0, 1, 1.0) == 3);
  CHECK(sample_count_m(3.0, 4, 0.3) == static_cast<std::uint64_t>(std::ceil(9.0 * std::log(40.0) / 0.09)));

  std::uint64_t prev = 0;
  for (double eta : {1.0, 1.5, 4.0, 10.0}) {
    const auto m = sample_count_m(eta, 3, 0.4);
    CHECK(m >= prev);
    prev = m;
  }
  CHECK(sample_count_m(2.0, 100, 0.5) >= sample_count_m(2.0, 10, 0.5));
  CHECK(sample_count_m(2.0, 10, 0.2) >= sample_count_m(2.0, 10, 0.5));

  CHECK_THROWS_AS(sample_count_m(0.5, 1, 0.5), ContractViolation);
  CHECK_THROWS_AS(sample_count_m(2.0, 0, 0.5), ContractViolation);
  CHECK_THROWS_AS(sample_count_m(2.0, 1, 0.0), ContractViolation);
  CHECK_THROWS_AS(sample_count_m(1e12, 1, 1e-6), Error);
}

TEST_CASE("failure budget preset") {
  CHECK(selection_failure_budget(2, 1, 3, 4) == doctest::Approx(1.0 / 24.0));
  CHECK_THROWS_AS(selection_failure_budget(0, 1, 1, 1), ContractViolation);
}

TEST_CASE("zero-variance instance is estimated exactly") {
  // Both points sit at distance 1/2 from the single center.
  const auto data = normalize_dataset(std::vector<Point>{{0}, {1}});
  const CenterSet c(std::vector<Point>{{0.5}});
  const DistanceOracle oracle(OracleConfig::exact(), data.eta());
  Rng rng(4);
  for (std::uint64_t m : {1, 7, 1000}) {
    CHECK(estimate_cost(data, c, m, oracle, rng).alpha_m == 0.5);
    CHECK(estimate_cost(data, c, m, oracle, rng, CostSampling::per_draw).alpha_m == 0.5);
  }
  CHECK(estimate_cost(data, CenterSet(data.points()), 50, oracle, rng).alpha_m == 0.0);
  CHECK(estimate_cost(data, c, 0, oracle, rng).alpha_m == exact_cost(data, c));
  CHECK_THROWS_AS(estimate_cost(data, CenterSet(1), 5, oracle, rng), ContractViolation);
}

TEST_CASE("estimate records its inputs") {
  const auto data = normalize_dataset(testing::random_points(6, 2, 3));
  const DistanceOracle oracle(OracleConfig::stochastic(0.25, 0.0), data.eta());
  Rng rng(0);
  const auto est = estimate_cost(data, CenterSet(std::vector<Point>{{0, 0}}), 11, oracle, rng);
  CHECK(est.m == 11);
  CHECK(est.eta_used == doctest::Approx(1.25 * data.eta()));
}

TEST_CASE("unbiased under the exact oracle") {
  const auto data = normalize_dataset(testing::random_points(20, 2, 9));
  const CenterSet c(std::vector<Point>{data.points()[0], data.points()[1]});
  const DistanceOracle oracle(OracleConfig::exact(), data.eta());
  const double phi = exact_cost(data, c);
  for (auto mode : {CostSampling::automatic, CostSampling::per_draw}) {
    Rng rng(mode == CostSampling::automatic ? 1 : 2);
    const int runs = 10000;
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < runs; ++r) {
      const double a = estimate_cost(data, c, 8, oracle, rng, mode).alpha_m;
      sum += a;
      sq += a * a;
    }
    const double mean = sum / runs;
    const double se = std::sqrt((sq / runs - mean * mean) / runs);
    CHECK(std::abs(mean - phi) <= 3.0 * se);
  }
}

TEST_CASE("two-valued instance respects the Hoeffding tail") {
  // X is 0 or 1 with equal chance, so S_m lives in [0, m].
  const auto data = normalize_dataset(std::vector<Point>{{0}, {1}});
  const CenterSet c(std::vector<Point>{{0}});
  const DistanceOracle oracle(OracleConfig::exact(), data.eta());
  const std::uint64_t m = 50;
  const double eps = 0.3;
  const double phi = 1.0;
  const double bound = 2.0 * std::exp(-2.0 * std::pow(eps * 0.5 * m, 2) / m);
  for (auto mode : {CostSampling::automatic, CostSampling::per_draw}) {
    Rng rng(77);
    const int runs = 20000;
    int tail = 0;
    for (int r = 0; r < runs; ++r) {
      tail += std::abs(estimate_cost(data, c, m, oracle, rng, mode).alpha_m - phi) >= eps * phi;
    }
    CHECK(static_cast<double>(tail) / runs <= bound);
  }
}

TEST_CASE("concentration at the prescribed sample count") {
  const auto data = normalize_dataset(testing::random_points(15, 2, 12));
  const CenterSet c(std::vector<Point>{data.points()[4]});
  const DistanceOracle oracle(OracleConfig::exact(), data.eta());
  const double phi = exact_cost(data, c);
  const double eps = 0.3;
  const auto m = sample_count_m(oracle.eta_tilde(), 4, eps);
  Rng rng(5);
  const int runs = 300;
  int outside = 0;
  for (int r = 0; r < runs; ++r) {
    outside += std::abs(estimate_cost(data, c, m, oracle, rng).alpha_m - phi) > eps * phi;
  }
  CHECK(outside <= runs / 20 + 3.0 * runs * testing::binomial_sigma(0.05, runs));
}

TEST_CASE("fixed seeds reproduce estimates bit for bit") {
  const auto data = normalize_dataset(testing::random_points(10, 3, 2));
  const CenterSet c(std::vector<Point>{data.points()[0]});
  for (const auto& cfg : {OracleConfig::exact(), OracleConfig::deterministic_delta(0.2, 5),
                          OracleConfig::stochastic(0.1, 0.05)}) {
    const DistanceOracle oracle(cfg, data.eta());
    Rng a(123), b(123);
    CHECK(estimate_cost(data, c, 500, oracle, a).alpha_m == estimate_cost(data, c, 500, oracle, b).alpha_m);
  }
}

TEST_CASE("select_min_cost") {
  const auto data = normalize_dataset(testing::random_points(10, 2, 40));
  const DistanceOracle oracle(OracleConfig::exact(), data.eta());
  Rng rng(1);

  SUBCASE("a single candidate") {
    CenterSetList list(1, 2);
    list.push_back(data.point(0));
    const auto s = select_min_cost(data, list, 0.5, oracle, rng);
    CHECK(s.index == 0);
    CHECK(s.estimate.m == sample_count_m(oracle.eta_tilde(), 1, 0.5));
    CHECK(s.estimate.list_size == 1);
  }
  SUBCASE("the zero-cost candidate wins") {
    CenterSetList list(10, 2);
    std::vector<double> bad;
    for (std::size_t i = 0; i < 10; ++i) bad.insert(bad.end(), {100.0 + i, 0.0});
    list.push_back(bad);
    list.push_back(data.coords());
    list.push_back(bad);
    const auto s = select_min_cost(data, list, 0.5, oracle, rng);
    CHECK(s.index == 1);
    CHECK(s.estimate.alpha_m == 0.0);
  }
  SUBCASE("ties go to the lowest index") {
    CenterSetList list(1, 2);
    for (int r = 0; r < 3; ++r) list.push_back(data.point(2));
    CHECK(select_min_cost(data, list, 0.5, oracle, rng, 0).index == 0);
  }
  SUBCASE("exhaustive sentinel finds the true argmin") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CenterSetList list(2, 2);
      const auto cand = testing::random_points(2 * 16, 2, 1000 + seed, -10, 10);
      std::size_t best = 0;
      double best_cost = INFINITY;
      for (std::size_t l = 0; l < 16; ++l) {
        const CenterSet cs(std::vector<Point>{cand[2 * l], cand[2 * l + 1]});
        list.push_back(cs.coords());
        const double cost = exact_cost(data, cs);
        if (cost < best_cost) {
          best_cost = cost;
          best = l;
        }
      }
      const auto s = select_min_cost(data, list, 0.5, oracle, rng, 0);
      CHECK(s.index == best);
      CHECK(s.estimate.alpha_m == best_cost);
    }
  }
  SUBCASE("per-candidate streams are derived from the recorded seed") {
    const DistanceOracle noisy(OracleConfig::stochastic(0.1, 0.01), data.eta());
    CenterSetList list(1, 2);
    for (std::size_t i = 0; i < 4; ++i) list.push_back(data.point(i));
    const auto s = select_min_cost(data, list, 0.5, noisy, rng, 64);
    REQUIRE(s.estimates.size() == 4);
    for (std::size_t l = 0; l < 4; ++l) {
      Rng stream(derive_seed(s.stream_seed, l));
      CHECK(estimate_cost(data, list[l], 64, noisy, stream).alpha_m == s.estimates[l].alpha_m);
    }
  }
  SUBCASE("empty list") {
    CHECK_THROWS_AS(select_min_cost(data, CenterSetList(1, 2), 0.5, oracle, rng), ContractViolation);
  }
}
