// qks: command-line harness for the k-means approximation scheme.
//
//   qks gen    write a synthetic dataset as CSV
//   qks run    solve one instance and write a JSON report
//   qks sweep  run a config over seed ranges and eps/delta grids (JSON lines)
//   qks opt    brute-force optimum of a small instance

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qks/csv.hpp"
#include "qks/error.hpp"
#include "qks/experiment.hpp"
#include "qks/scheme.hpp"

namespace {

using nlohmann::json;

constexpr const char* kPresetHelp =
    "Parameter preset. 'paper': tau = ceil(2/eps'), rho = ceil(k/eps'^4) with eps' = eps/4; "
    "carries the (1+eps) guarantee but the candidate list is astronomically large. "
    "'desk': tau = ceil(1/eps), rho = 2k; no guarantee, tractable for N <= 20, k <= 2.";

// Flags shared by `run` and `sweep`. Only flags the user actually passes
// override the config file.
struct RunFlags {
  std::string config_path;
  std::string data;
  std::size_t k = 2;
  double eps = 0.5;
  std::string oracle = "exact";
  double eps_rel = 0.0;
  double delta = 0.0;
  double delta_fail = 0.0;
  std::uint64_t oracle_seed = 0;
  std::string preset = "desk";
  std::uint64_t rho = 0, tau = 0, repetitions = 0;
  std::uint64_t list_cap = qks::kDefaultListCap;
  std::uint64_t seed = 0;
  std::string out;
  bool brute_force = false;
  double max_partitions = 2.0e7;
  bool audit = false;

  std::map<std::string, CLI::Option*> opts;

  void add_to(CLI::App* app) {
    opts["config"] = app->add_option("--config", config_path, "JSON run configuration file");
    opts["data"] = app->add_option("--data", data, "Dataset CSV (one point per row)");
    opts["k"] = app->add_option("--k", k, "Number of clusters");
    opts["eps"] = app->add_option("--eps", eps, "Target error eps in (0, 1/2]");
    opts["oracle"] = app->add_option("--oracle", oracle, "exact | deterministic-delta | stochastic")
                         ->check(CLI::IsMember({"exact", "deterministic-delta", "stochastic"}));
    opts["eps_rel"] = app->add_option("--eps-rel", eps_rel, "Relative error of the stochastic oracle");
    opts["delta"] = app->add_option("--delta", delta, "Closeness delta of the deterministic-delta oracle");
    opts["delta_fail"] = app->add_option("--delta-fail", delta_fail, "Failure parameter (fails w.p. 2x)");
    opts["oracle_seed"] = app->add_option("--oracle-seed", oracle_seed, "Key of the deterministic multipliers");
    opts["preset"] = app->add_option("--preset", preset, kPresetHelp)->check(CLI::IsMember({"paper", "desk"}));
    opts["rho"] = app->add_option("--rho", rho, "Override rho (D^2 samples per cluster)");
    opts["tau"] = app->add_option("--tau", tau, "Override tau (subset size)");
    opts["repetitions"] = app->add_option("--repetitions", repetitions, "Override outer repetitions R");
    opts["list_cap"] = app->add_option("--list-cap", list_cap, "Abort if the candidate list would exceed this");
    opts["seed"] = app->add_option("--seed", seed, "Run seed (QKS_SEED overrides)");
    opts["out"] = app->add_option("--out", out, "Output path (stdout if omitted)");
    opts["brute_force"] = app->add_flag("--brute-force", brute_force, "Compute OPT by brute force and the ratio");
    opts["max_partitions"] =
        app->add_option("--max-partitions", max_partitions, "Brute-force cap on S(N, k)");
    opts["audit"] = app->add_flag("--audit-candidates", audit, "Record every candidate's estimate");
  }

  bool given(const char* name) const { return opts.at(name)->count() > 0; }

  qks::RunConfig resolve() const {
    qks::RunConfig c;
    if (given("config")) {
      std::ifstream in(config_path);
      if (!in) throw qks::Error(qks::ErrorCode::config_error, "cannot open config " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw qks::Error(qks::ErrorCode::config_error, std::string("config is not JSON: ") + e.what());
      }
      c = j.get<qks::RunConfig>();
    }
    if (given("data")) c.data_path = data, c.generator.reset();
    if (given("k")) c.k = k;
    if (given("eps")) c.eps = eps;
    if (given("oracle")) c.oracle.mode = qks::parse_oracle_mode(oracle);
    if (given("eps_rel")) c.oracle.eps_rel = eps_rel;
    if (given("delta")) c.oracle.eps_rel = delta;
    if (given("delta_fail")) c.oracle.delta_fail = delta_fail;
    if (given("oracle_seed")) c.oracle.oracle_seed = oracle_seed;
    if (given("preset")) c.preset = qks::parse_preset(preset);
    if (given("rho")) c.rho = rho;
    if (given("tau")) c.tau = tau;
    if (given("repetitions")) c.repetitions = repetitions;
    if (given("list_cap")) c.list_cap = list_cap;
    if (given("seed")) c.seed = seed;
    if (given("out")) c.output = out;
    if (given("brute_force")) c.brute_force = brute_force;
    if (given("max_partitions")) c.brute_force_limits.max_partitions = max_partitions;
    if (given("audit")) c.audit_candidates = audit;
    if (const char* env = std::getenv("QKS_SEED")) {
      try {
        c.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw qks::Error(qks::ErrorCode::config_error, "QKS_SEED is not an unsigned integer");
      }
    }
    return c;
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    qks::write_file_atomic(path, text);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw qks::Error(qks::ErrorCode::config_error, "bad number in list: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximation scheme for k-means with emulated noisy distance oracles"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
  qks::GeneratorSpec spec;
  std::string kind = "gaussian-mixture";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--kind", kind, "gaussian-mixture | uniform-box | grid")
      ->check(CLI::IsMember({"gaussian-mixture", "uniform-box", "grid"}));
  gen->add_option("--clusters", spec.clusters, "Mixture components");
  gen->add_option("--n", spec.n, "Points (grid: points per axis)");
  gen->add_option("--dim", spec.dim, "Dimension");
  gen->add_option("--separation", spec.separation, "Distance between mixture means");
  gen->add_option("--spread", spec.spread, "Per-coordinate std. deviation of a component");
  gen->add_option("--extent", spec.extent, "Box side length or grid spacing");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // run
  auto* run = app.add_subcommand("run", "Solve one instance and write a JSON report");
  RunFlags run_flags;
  run_flags.add_to(run);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a config over seeds and eps/delta grids (JSON lines)");
  RunFlags sweep_flags;
  sweep_flags.add_to(sweep);
  std::uint64_t seed_count = 20;
  std::string eps_grid, delta_grid;
  sweep->add_option("--seeds", seed_count, "Number of consecutive seeds starting at --seed");
  sweep->add_option("--eps-grid", eps_grid, "Comma-separated eps values");
  sweep->add_option("--delta-grid", delta_grid, "Comma-separated oracle eps_rel/delta values");

  // opt
  auto* opt = app.add_subcommand("opt", "Brute-force k-means optimum (small instances only)");
  std::string opt_data;
  std::size_t opt_k = 2;
  double opt_cap = 2.0e7;
  opt->add_option("--data", opt_data, "Dataset CSV")->required();
  opt->add_option("--k", opt_k, "Number of clusters");
  opt->add_option("--max-partitions", opt_cap, "Cap on S(N, k)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qks::exit_code(qks::ErrorCode::config_error);
  }

  try {
    if (*gen) {
      spec.kind = qks::parse_generator_kind(kind);
      const auto points = qks::generate_points(spec, gen_seed);
      std::ostringstream csv;
      qks::write_points_csv(csv, points);
      qks::write_file_atomic(gen_out, csv.str());
      const auto data = qks::normalize_dataset(points);
      std::cout << json{{"n", data.size()}, {"d", data.dim()}, {"eta", data.eta()}, {"scale", data.scale()}}.dump()
                << '\n';
    } else if (*run) {
      const auto config = run_flags.resolve();
      const auto report = qks::run_experiment(config);
      emit(config.output, report.dump(2) + "\n");
    } else if (*sweep) {
      const auto config = sweep_flags.resolve();
      qks::SweepGrid grid;
      grid.first_seed = config.seed;
      grid.seed_count = seed_count;
      if (!eps_grid.empty()) grid.eps_values = parse_list(eps_grid);
      if (!delta_grid.empty()) grid.delta_values = parse_list(delta_grid);
      const auto records = qks::run_sweep(config, grid);
      std::string text;
      std::size_t ok = 0, successes = 0, with_opt = 0;
      for (const auto& r : records) {
        json line = r;
        line.erase("timings");
        text += line.dump() + "\n";
        if (r.at("status") == "ok") {
          ++ok;
          if (!r.at("opt").is_null()) {
            ++with_opt;
            if (r.at("opt").at("success").get<bool>()) ++successes;
          }
        }
      }
      emit(config.output, text);
      std::cerr << "runs=" << records.size() << " ok=" << ok << " with_opt=" << with_opt
                << " success=" << successes << '\n';
    } else if (*opt) {
      const auto points = qks::load_points_csv(opt_data);
      const auto data = qks::normalize_dataset(points);
      const auto result = qks::brute_force_opt(data, opt_k, {opt_cap});
      json centers = json::array();
      for (const auto& c : result.centers.centers()) {
        json row = json::array();
        for (double x : c) row.push_back(x * data.scale());
        centers.push_back(row);
      }
      std::cout << json{{"k", opt_k},
                        {"cost", result.cost},
                        {"cost_raw", result.cost * data.scale() * data.scale()},
                        {"centers", centers},
                        {"assignment", result.assignment}}
                       .dump(2)
                << '\n';
    }
  } catch (const qks::Error& e) {
    std::cerr << "qks: " << qks::to_string(e.code()) << ": " << e.what() << '\n';
    return qks::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "qks: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
