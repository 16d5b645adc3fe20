#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qks/csv.hpp"
#include "qks/experiment.hpp"
#include "test_support.hpp"

using namespace qks;
using nlohmann::json;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.generator = GeneratorSpec{GeneratorKind::gaussian_mixture, 2, 8, 2, 50.0, 0.5, 1.0};
  c.generator_seed = 3;
  c.k = 2;
  c.eps = 0.5;
  c.rho = 1;
  c.tau = 1;
  c.repetitions = 1;
  c.seed = 11;
  c.brute_force = true;
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qks_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("generators") {
  const GeneratorSpec mix{GeneratorKind::gaussian_mixture, 3, 30, 4, 10.0, 0.1, 1.0};
  const auto a = generate_points(mix, 5);
  CHECK(a.size() == 30);
  CHECK(a[0].size() == 4);
  CHECK(a == generate_points(mix, 5));
  CHECK(a != generate_points(mix, 6));

  const GeneratorSpec box{GeneratorKind::uniform_box, 1, 50, 3, 0.0, 0.0, 2.0};
  for (const auto& p : generate_points(box, 1))
    for (double x : p) CHECK((x >= 0.0 && x <= 2.0));

  const GeneratorSpec grid{GeneratorKind::grid, 1, 3, 2, 0.0, 0.0, 1.5};
  const auto g = generate_points(grid, 0);
  CHECK(g.size() == 9);
  CHECK(normalize_dataset(g).scale() == doctest::Approx(1.5));

  CHECK(parse_generator_kind("uniform-box") == GeneratorKind::uniform_box);
  CHECK_THROWS_AS(parse_generator_kind("spiral"), Error);
}

TEST_CASE("run config JSON round trip") {
  auto c = small_config();
  c.oracle = OracleConfig::stochastic(0.2, 0.01, 9);
  c.preset = Preset::paper;
  c.list_cap = 1234;
  c.audit_candidates = true;
  const json j = c;
  const auto back = j.get<RunConfig>();
  CHECK(json(back) == j);
  CHECK(back.oracle.mode == OracleMode::stochastic);
  CHECK(back.tau == std::optional<std::uint64_t>{1});
  CHECK(back.scheme_params().tau == 1);
  CHECK(back.scheme_params().rho == 1);

  const auto defaults = json::object().get<RunConfig>();
  CHECK(defaults.k == 2);
  CHECK_FALSE(defaults.rho.has_value());

  try {
    json{{"oracle", {{"mode", "psychic"}}}}.get<RunConfig>();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
  }
  try {
    json{{"k", "two"}}.get<RunConfig>();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
  }
}

TEST_CASE("dataset digest") {
  const std::vector<Point> pts{{0, 1}, {2, 3}};
  const auto d = dataset_digest(pts);
  CHECK(d.rfind("fnv1a64:", 0) == 0);
  CHECK(d.size() == 8 + 16);
  CHECK(d == dataset_digest(std::vector<Point>{{0, 1}, {2, 3}}));
  CHECK(d != dataset_digest(std::vector<Point>{{2, 3}, {0, 1}}));
  CHECK(d != dataset_digest(std::vector<Point>{{0, 1}, {2, 3.0000000001}}));
}

TEST_CASE("run_experiment report") {
  const auto report = run_experiment(small_config());
  CHECK(report["status"] == "ok");
  for (const char* key : {"config", "dataset", "params", "oracle", "seeds", "seeding", "candidates", "selection",
                          "result", "opt", "timings"}) {
    CAPTURE(key);
    CHECK(report.contains(key));
  }
  CHECK(report["dataset"]["n"] == 8);
  CHECK(report["candidates"]["list_size"] == 90);
  CHECK(report["result"]["centers"].size() == 2);
  const double ratio = report["opt"]["ratio"];
  CHECK(ratio >= 1.0 - 1e-12);
  CHECK(report["opt"]["success"] == (ratio <= 1.5));
  CHECK_FALSE(report.contains("candidate_audit"));

  SUBCASE("byte-identical apart from timings") {
    auto a = report;
    auto b = run_experiment(small_config());
    a.erase("timings");
    b.erase("timings");
    CHECK(a.dump() == b.dump());
  }
  SUBCASE("candidate audit") {
    auto c = small_config();
    c.audit_candidates = true;
    const auto r = run_experiment(c);
    REQUIRE(r["candidate_audit"].size() == 90);
    const std::size_t idx = r["selection"]["index"];
    CHECK(r["candidate_audit"][idx]["alpha_m"] == r["selection"]["estimate"]);
  }
  SUBCASE("data from a CSV file") {
    const auto path = scratch("points.csv");
    {
      std::ofstream out(path);
      write_points_csv(out, load_points(small_config()));
    }
    auto c = small_config();
    c.generator.reset();
    c.data_path = path.string();
    const auto r = run_experiment(c);
    CHECK(r["dataset"]["digest"] == report["dataset"]["digest"]);
    CHECK(r["result"] == report["result"]);
    std::filesystem::remove(path);
  }
}

TEST_CASE("run_experiment errors") {
  auto c = small_config();
  c.generator.reset();
  c.data_path = "/nonexistent/points.csv";
  try {
    run_experiment(c);
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }

  c = small_config();
  c.generator->n = 30;
  c.k = 3;
  try {
    run_experiment(c);
    FAIL("expected brute force to refuse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::brute_force_infeasible);
  }
}

TEST_CASE("sweep") {
  auto c = small_config();
  c.brute_force = false;
  SweepGrid grid;
  grid.first_seed = 4;
  grid.seed_count = 2;
  grid.eps_values = {0.5, 0.9};
  const auto records = run_sweep(c, grid);
  REQUIRE(records.size() == 4);
  CHECK(records[0]["status"] == "ok");
  CHECK(records[0]["seeds"]["run"] == 4);
  CHECK(records[1]["seeds"]["run"] == 5);
  CHECK(records[2]["status"] == "error");
  CHECK(records[2]["error"]["code"] == "config_error");
}

TEST_CASE("atomic file writes") {
  const auto path = scratch("report.json");
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_file_atomic("/nonexistent/dir/x.json", "x"), Error);
}

TEST_CASE("exit codes are distinct per category") {
  CHECK(exit_code(ErrorCode::config_error) == 2);
  CHECK(exit_code(ErrorCode::brute_force_infeasible) == 3);
  CHECK(exit_code(ErrorCode::sampler_starvation) == 4);
  CHECK(exit_code(ErrorCode::list_size_cap) == 5);
  CHECK(exit_code(ErrorCode::io_error) == 6);
  CHECK(exit_code(ErrorCode::degenerate_dataset) == 7);
  CHECK(exit_code(ErrorCode::invalid_amplitude) == 8);
  CHECK(exit_code(ErrorCode::contract_violation) == 9);
}
