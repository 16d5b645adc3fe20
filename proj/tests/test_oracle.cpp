#include <doctest.h>

#include <cmath>

#include "qks/error.hpp"
#include "qks/oracle.hpp"
#include "test_support.hpp"

using namespace qks;

TEST_CASE("exact oracle returns the true distance") {
  const DistanceOracle oracle(OracleConfig::exact(), 10.0);
  Rng rng(1);
  const auto e = estimate_distance(Point{0, 0}, Point{3, 4}, oracle, rng);
  CHECK(e.value == 5.0);
  CHECK_FALSE(e.failed);
}

TEST_CASE("exact mode zeroes the error parameters") {
  OracleConfig cfg{OracleMode::exact, 0.3, 0.2, 9};
  const DistanceOracle oracle(cfg, 4.0);
  CHECK(oracle.config().eps_rel == 0.0);
  CHECK(oracle.config().delta_fail == 0.0);
  CHECK(oracle.eta_tilde() == 4.0);
}

TEST_CASE("oracle config validation") {
  CHECK_THROWS_AS(OracleConfig::stochastic(1.0, 0.0).validate(), Error);
  CHECK_THROWS_AS(OracleConfig::stochastic(-0.1, 0.0).validate(), Error);
  CHECK_THROWS_AS(OracleConfig::stochastic(0.1, 0.5).validate(), Error);
  CHECK_NOTHROW(OracleConfig::stochastic(0.1, 0.49).validate());
  CHECK(parse_oracle_mode("deterministic-delta") == OracleMode::deterministic_delta);
  CHECK_THROWS_AS(parse_oracle_mode("quantum"), Error);
}

TEST_CASE("deterministic-delta with a fixed multiplier") {
  const DistanceOracle oracle(OracleConfig::deterministic_delta(0.1), 5.0,
                              [](PointView, PointView) { return 1.05; });
  Rng rng(3);
  const auto e = estimate_distance(Point{0, 0}, Point{0, 2}, oracle, rng);
  CHECK(e.value == doctest::Approx(2.1).epsilon(1e-15));
  CHECK_FALSE(e.failed);

  const DistanceOracle bad(OracleConfig::deterministic_delta(0.1), 5.0, [](PointView, PointView) { return 1.2; });
  CHECK_THROWS_AS(bad.estimate(Point{0}, Point{1}, rng), ContractViolation);
  CHECK_THROWS_AS(DistanceOracle(OracleConfig::exact(), 5.0, [](PointView, PointView) { return 1.0; }),
                  ContractViolation);
}

TEST_CASE("deterministic-delta oracle is a delta-close function") {
  const auto pts = testing::random_points(12, 3, 5);
  for (double delta : {0.05, 0.25, 0.5}) {
    const DistanceOracle oracle(OracleConfig::deterministic_delta(delta, 77), 100.0);
    Rng rng(0);
    double lo = 2.0, hi = 0.0;
    for (const auto& p : pts) {
      for (const auto& q : pts) {
        if (&p == &q) continue;
        const double truth = euclidean_distance(p, q);
        const auto a = oracle.estimate(p, q, rng);
        const auto b = oracle.estimate(p, q, rng);
        const auto ba = oracle.estimate(q, p, rng);
        CHECK(a.value == b.value);
        CHECK(a.value == ba.value);
        const double ratio = a.value / truth;
        CHECK(ratio >= 1.0 - delta - 1e-15);
        CHECK(ratio <= 1.0 + delta + 1e-15);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    // The hash actually spreads multipliers over the band.
    CHECK(hi - lo > delta);
  }
}

TEST_CASE("deterministic multipliers depend on the oracle seed") {
  const DistanceOracle a(OracleConfig::deterministic_delta(0.3, 1), 10.0);
  const DistanceOracle b(OracleConfig::deterministic_delta(0.3, 2), 10.0);
  CHECK(a.multiplier(Point{0, 0}, Point{1, 2}) != b.multiplier(Point{0, 0}, Point{1, 2}));
  CHECK(a.multiplier(Point{-0.0}, Point{1}) == a.multiplier(Point{0.0}, Point{1}));
}

TEST_CASE("stochastic oracle without failures stays in the relative band") {
  const DistanceOracle oracle(OracleConfig::stochastic(0.1, 0.0), 20.0);
  Rng rng(42);
  const Point p{0, 0}, q{6, 8};
  double sum = 0.0;
  bool in_band = true;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto e = oracle.estimate(p, q, rng);
    in_band = in_band && !e.failed && e.value >= 9.0 && e.value <= 11.0;
    sum += e.value;
  }
  CHECK(in_band);
  CHECK(std::abs(sum / draws - 10.0) < 0.1);
}

TEST_CASE("stochastic failures emit garbage inside [1, (1+eps) eta]") {
  const double eta = 30.0;
  const DistanceOracle oracle(OracleConfig::stochastic(0.2, 0.4), eta);
  Rng rng(8);
  int failures = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto e = oracle.estimate(Point{0}, Point{2}, rng);
    if (e.failed) {
      ++failures;
      CHECK(e.value >= 1.0);
      CHECK(e.value <= 1.2 * eta);
    } else {
      CHECK(e.value >= 1.6);
      CHECK(e.value <= 2.4);
    }
  }
  CHECK(failures == doctest::Approx(0.8 * 20000).epsilon(0.03));
}

TEST_CASE("min-distance estimate") {
  const DistanceOracle exact(OracleConfig::exact(), 10.0);
  Rng rng(1);
  const CenterSet c(std::vector<Point>{{1, 0}, {5, 0}});
  CHECK(estimate_min_distance(Point{0, 0}, c, exact, rng).value == 1.0);
  CHECK_THROWS_AS(estimate_min_distance(Point{0, 0}, CenterSet(2), exact, rng), ContractViolation);

  SUBCASE("a single center behaves like a single estimate") {
    const DistanceOracle noisy(OracleConfig::stochastic(0.3, 0.1), 10.0);
    Rng r1(99), r2(99);
    const CenterSet one(std::vector<Point>{{3, 4}});
    for (int i = 0; i < 1000; ++i) {
      const auto a = estimate_min_distance(Point{0, 0}, one, noisy, r1);
      const auto b = estimate_distance(Point{0, 0}, Point{3, 4}, noisy, r2);
      CHECK(a.value == b.value);
      CHECK(a.failed == b.failed);
    }
  }
}

TEST_CASE("exact min-distance matches brute force on every point") {
  const auto data = normalize_dataset(testing::random_points(25, 2, 17));
  const CenterSet c(testing::random_points(4, 2, 18, -30, 30));
  const DistanceOracle oracle(OracleConfig::exact(), data.eta());
  Rng rng(0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < c.size(); ++j) best = std::min(best, euclidean_distance(data.point(i), c.center(j)));
    CHECK(estimate_min_distance(data.point(i), c, oracle, rng).value == best);
  }
}

TEST_CASE("failure flag composes over t centers") {
  const double fail = 0.01;
  const DistanceOracle oracle(OracleConfig::stochastic(0.1, fail), 50.0);
  const CenterSet c(std::vector<Point>{{1, 0}, {0, 3}, {4, 4}});
  Rng rng(2024);
  const int trials = 100000;
  int failed = 0;
  for (int i = 0; i < trials; ++i) failed += estimate_min_distance(Point{0, 0}, c, oracle, rng).failed;
  const double expected = 1.0 - std::pow(1.0 - 2.0 * fail, 3);
  const double rate = static_cast<double>(failed) / trials;
  CHECK(std::abs(rate - expected) <= 3.0 * testing::binomial_sigma(expected, trials));
}

TEST_CASE("min-distance profile") {
  const auto data = normalize_dataset(testing::random_points(30, 3, 4));
  const CenterSet c(testing::random_points(3, 3, 5));
  Rng rng(6);

  SUBCASE("exact entries equal the truth") {
    const DistanceOracle oracle(OracleConfig::exact(), data.eta());
    const auto prof = min_distance_profile(data, c, oracle, rng);
    REQUIRE(prof.estimates.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(prof.estimates[i].value == std::sqrt(nearest_center(data.point(i), c).squared_distance));
    }
    CHECK(prof.all_succeeded);
    CHECK(prof.success_probability == 1.0);
  }
  SUBCASE("relative band without failures") {
    const DistanceOracle oracle(OracleConfig::stochastic(0.2, 0.0), data.eta());
    const auto prof = min_distance_profile(data, c, oracle, rng);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double truth = std::sqrt(nearest_center(data.point(i), c).squared_distance);
      CHECK(prof.estimates[i].value >= 0.8 * truth);
      CHECK(prof.estimates[i].value <= 1.2 * truth);
    }
  }
  SUBCASE("success probability model") {
    const DistanceOracle oracle(OracleConfig::stochastic(0.2, 0.001), data.eta());
    const auto prof = min_distance_profile(data, c, oracle, rng);
    CHECK(prof.success_probability == doctest::Approx(std::pow(0.998, 90.0)).epsilon(1e-12));
  }
  SUBCASE("centers on the points give zeros") {
    const auto two = normalize_dataset(std::vector<Point>{{0, 0}, {3, 0}});
    const DistanceOracle oracle(OracleConfig::exact(), two.eta());
    const auto prof = min_distance_profile(two, CenterSet(two.points()), oracle, rng);
    CHECK(prof.estimates[0].value == 0.0);
    CHECK(prof.estimates[1].value == 0.0);
  }
}

TEST_CASE("oracle counts queries") {
  const DistanceOracle oracle(OracleConfig::exact(), 10.0);
  Rng rng(0);
  const CenterSet c(std::vector<Point>{{1}, {2}, {3}});
  estimate_min_distance(Point{0}, c, oracle, rng);
  oracle.estimate(Point{0}, Point{1}, rng);
  CHECK(oracle.queries() == 4);
  const DistanceOracle copy(oracle);
  CHECK(copy.queries() == 4);
}
