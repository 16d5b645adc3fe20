#include "qks/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <bit>

#include "qks/csv.hpp"
#include "qks/error.hpp"
#include "qks/random.hpp"

namespace qks {

using nlohmann::json;

const char* to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::gaussian_mixture: return "gaussian-mixture";
    case GeneratorKind::uniform_box: return "uniform-box";
    case GeneratorKind::grid: return "grid";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "gaussian-mixture") return GeneratorKind::gaussian_mixture;
  if (name == "uniform-box") return GeneratorKind::uniform_box;
  if (name == "grid") return GeneratorKind::grid;
  throw Error(ErrorCode::config_error, "unknown generator '" + name + "'");
}

namespace {

double standard_normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::vector<Point> generate_points(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.dim < 1) throw Error(ErrorCode::config_error, "generator dimension must be positive");
  if (spec.n < 1) throw Error(ErrorCode::config_error, "generator size must be positive");
  Rng rng(seed);
  std::vector<Point> points;
  switch (spec.kind) {
    case GeneratorKind::gaussian_mixture: {
      if (spec.clusters < 1) throw Error(ErrorCode::config_error, "mixture needs at least one cluster");
      for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t cluster = i * spec.clusters / spec.n;
        Point p(spec.dim);
        for (std::size_t c = 0; c < spec.dim; ++c) {
          const double mean = c == 0 ? static_cast<double>(cluster) * spec.separation : 0.0;
          p[c] = mean + spec.spread * standard_normal(rng);
        }
        points.push_back(std::move(p));
      }
      break;
    }
    case GeneratorKind::uniform_box:
      for (std::size_t i = 0; i < spec.n; ++i) {
        Point p(spec.dim);
        for (auto& x : p) x = spec.extent * rng.uniform();
        points.push_back(std::move(p));
      }
      break;
    case GeneratorKind::grid: {
      std::size_t total = 1;
      for (std::size_t c = 0; c < spec.dim; ++c) total *= spec.n;
      for (std::size_t idx = 0; idx < total; ++idx) {
        Point p(spec.dim);
        std::size_t rest = idx;
        for (std::size_t c = 0; c < spec.dim; ++c) {
          p[c] = static_cast<double>(rest % spec.n) * spec.extent;
          rest /= spec.n;
        }
        points.push_back(std::move(p));
      }
      break;
    }
  }
  // Rejects degenerate specs (a single point, zero spread, ...).
  normalize_dataset(points);
  return points;
}

SchemeParams RunConfig::scheme_params() const {
  auto params = SchemeParams::from_preset(preset, k, eps);
  if (rho) params.rho = *rho;
  if (tau) params.tau = *tau;
  if (repetitions) params.repetitions = *repetitions;
  params.list_cap = list_cap;
  return params;
}

void to_json(json& j, const GeneratorSpec& spec) {
  j = json{{"kind", to_string(spec.kind)}, {"clusters", spec.clusters}, {"n", spec.n},
           {"dim", spec.dim},             {"separation", spec.separation},
           {"spread", spec.spread},       {"extent", spec.extent}};
}

void from_json(const json& j, GeneratorSpec& spec) {
  const GeneratorSpec defaults;
  spec.kind = parse_generator_kind(j.value("kind", std::string(to_string(defaults.kind))));
  spec.clusters = j.value("clusters", defaults.clusters);
  spec.n = j.value("n", defaults.n);
  spec.dim = j.value("dim", defaults.dim);
  spec.separation = j.value("separation", defaults.separation);
  spec.spread = j.value("spread", defaults.spread);
  spec.extent = j.value("extent", defaults.extent);
}

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const RunConfig& c) {
  j = json{
      {"data", c.data_path},
      {"generator", c.generator ? json(*c.generator) : json(nullptr)},
      {"generator_seed", c.generator_seed},
      {"k", c.k},
      {"eps", c.eps},
      {"oracle",
       {{"mode", to_string(c.oracle.mode)},
        {"eps_rel", c.oracle.eps_rel},
        {"delta_fail", c.oracle.delta_fail},
        {"oracle_seed", c.oracle.oracle_seed}}},
      {"scheme",
       {{"preset", to_string(c.preset)},
        {"rho", optional_json(c.rho)},
        {"tau", optional_json(c.tau)},
        {"repetitions", optional_json(c.repetitions)},
        {"list_cap", c.list_cap}}},
      {"seed", c.seed},
      {"output", c.output},
      {"brute_force", c.brute_force},
      {"brute_force_max_partitions", c.brute_force_limits.max_partitions},
      {"audit_candidates", c.audit_candidates},
  };
}

void from_json(const json& j, RunConfig& c) {
  try {
    const RunConfig defaults;
    c.data_path = j.value("data", defaults.data_path);
    c.generator = optional_from<GeneratorSpec>(j, "generator");
    c.generator_seed = j.value("generator_seed", defaults.generator_seed);
    c.k = j.value("k", defaults.k);
    c.eps = j.value("eps", defaults.eps);
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      c.oracle.mode = parse_oracle_mode(o.value("mode", std::string("exact")));
      c.oracle.eps_rel = o.value("eps_rel", 0.0);
      c.oracle.delta_fail = o.value("delta_fail", 0.0);
      c.oracle.oracle_seed = o.value("oracle_seed", std::uint64_t{0});
    }
    if (j.contains("scheme")) {
      const auto& s = j.at("scheme");
      c.preset = parse_preset(s.value("preset", std::string("desk")));
      c.rho = optional_from<std::uint64_t>(s, "rho");
      c.tau = optional_from<std::uint64_t>(s, "tau");
      c.repetitions = optional_from<std::uint64_t>(s, "repetitions");
      c.list_cap = s.value("list_cap", defaults.list_cap);
    }
    c.seed = j.value("seed", defaults.seed);
    c.output = j.value("output", defaults.output);
    c.brute_force = j.value("brute_force", defaults.brute_force);
    c.brute_force_limits.max_partitions =
        j.value("brute_force_max_partitions", defaults.brute_force_limits.max_partitions);
    c.audit_candidates = j.value("audit_candidates", defaults.audit_candidates);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("bad config: ") + e.what());
  }
}

std::string dataset_digest(std::span<const Point> points) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : points) {
    feed(p.size());
    for (double x : p) feed(std::bit_cast<std::uint64_t>(x));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

std::vector<Point> load_points(const RunConfig& config) {
  if (config.generator) return generate_points(*config.generator, config.generator_seed);
  if (config.data_path.empty()) throw Error(ErrorCode::config_error, "no dataset: give a data path or a generator");
  auto points = load_points_csv(config.data_path);
  if (points.empty()) throw Error(ErrorCode::io_error, "no points in " + config.data_path);
  return points;
}

namespace {

json raw_centers(const CenterSet& centers, double scale) {
  json out = json::array();
  for (std::size_t j = 0; j < centers.size(); ++j) {
    json row = json::array();
    for (double x : centers.center(j)) row.push_back(x * scale);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

json run_experiment(const RunConfig& config) {
  const auto raw = load_points(config);
  const Dataset data = normalize_dataset(raw);
  const auto params = config.scheme_params();
  params.validate();
  config.oracle.validate();

  json timings = json::object();
  std::optional<BruteForceResult> opt;
  if (config.brute_force) {
    const auto start = std::chrono::steady_clock::now();
    opt = brute_force_opt(data, config.k, config.brute_force_limits);
    timings["brute_force"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  const auto result = solve(data, params, config.oracle, config.seed);
  const auto& r = result.report;
  for (const auto& t : r.timings) timings[t.stage] = t.seconds;

  const double scale2 = data.scale() * data.scale();
  json report = {
      {"status", "ok"},
      {"config", config},
      {"dataset",
       {{"path", config.data_path},
        {"digest", dataset_digest(raw)},
        {"n", data.size()},
        {"d", data.dim()},
        {"scale", data.scale()},
        {"eta", data.eta()}}},
      {"params",
       {{"k", params.k},
        {"eps", params.eps},
        {"eps_prime", params.eps_prime},
        {"preset", to_string(params.preset)},
        {"rho", params.rho},
        {"effective_rho", r.effective_rho},
        {"tau", params.tau},
        {"repetitions", params.repetitions},
        {"list_cap", params.list_cap}}},
      {"oracle",
       {{"mode", to_string(config.oracle.mode)},
        {"eps_rel", config.oracle.eps_rel},
        {"delta_fail", config.oracle.delta_fail},
        {"oracle_seed", config.oracle.oracle_seed}}},
      {"seeds",
       {{"run", r.seed},
        {"seeding", r.seeding_stream},
        {"candidates", r.list_stream},
        {"selection", r.selection_stream},
        {"candidate_streams", r.candidate_stream_seed}}},
      {"seeding",
       {{"indices", r.seed_indices},
        {"cost", r.seed_cost},
        {"proposals", r.seeding_proposals},
        {"queries", r.seeding_queries}}},
      {"candidates",
       {{"multiset_size", r.multiset_size},
        {"list_size", r.list_size},
        {"distinct", r.distinct_list_size},
        {"proposals", r.list_proposals},
        {"queries", r.list_queries},
        {"best_cost", r.best_list_cost}}},
      {"selection",
       {{"m", r.m},
        {"index", r.selected_index},
        {"estimate", r.selected_estimate},
        {"queries", r.selection_queries},
        {"modeled_queries", r.modeled_selection_queries}}},
      {"result",
       {{"centers", raw_centers(result.centers, data.scale())},
        {"cost", r.final_cost},
        {"cost_raw", r.final_cost * scale2}}},
  };

  if (opt) {
    const double ratio = opt->cost > 0.0 ? r.final_cost / opt->cost : (r.final_cost == 0.0 ? 1.0 : INFINITY);
    report["opt"] = {
        {"cost", opt->cost},
        {"cost_raw", opt->cost * scale2},
        {"centers", raw_centers(opt->centers, data.scale())},
        {"assignment", opt->assignment},
        {"ratio", ratio},
        {"list_ratio", opt->cost > 0.0 ? r.best_list_cost / opt->cost : 1.0},
        {"success", r.final_cost <= (1.0 + params.eps) * opt->cost},
    };
  } else {
    report["opt"] = nullptr;
  }

  if (config.audit_candidates) {
    json audit = json::array();
    for (std::size_t l = 0; l < r.candidate_estimates.size(); ++l) {
      const auto& e = r.candidate_estimates[l];
      audit.push_back({{"index", l}, {"alpha_m", e.alpha_m}, {"m", e.m},
                       {"seed", derive_seed(r.candidate_stream_seed, l)}});
    }
    report["candidate_audit"] = std::move(audit);
  }
  report["timings"] = std::move(timings);
  return report;
}

std::vector<json> run_sweep(const RunConfig& base, const SweepGrid& grid) {
  const std::vector<double> eps_values = grid.eps_values.empty() ? std::vector<double>{base.eps} : grid.eps_values;
  const std::vector<double> delta_values =
      grid.delta_values.empty() ? std::vector<double>{base.oracle.eps_rel} : grid.delta_values;
  std::vector<json> records;
  for (double eps : eps_values) {
    for (double delta : delta_values) {
      for (std::uint64_t s = 0; s < grid.seed_count; ++s) {
        RunConfig config = base;
        config.eps = eps;
        config.oracle.eps_rel = delta;
        config.seed = grid.first_seed + s;
        config.output.clear();
        try {
          records.push_back(run_experiment(config));
        } catch (const Error& e) {
          records.push_back({{"status", "error"},
                             {"config", config},
                             {"error", {{"code", to_string(e.code())}, {"message", e.what()}}}});
        }
      }
    }
  }
  return records;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot rename into " + path.string() + ": " + ec.message());
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config_error: return 2;
    case ErrorCode::brute_force_infeasible: return 3;
    case ErrorCode::sampler_starvation: return 4;
    case ErrorCode::list_size_cap: return 5;
    case ErrorCode::io_error: return 6;
    case ErrorCode::degenerate_dataset: return 7;
    case ErrorCode::invalid_amplitude: return 8;
    case ErrorCode::empty_distribution: return 8;
    case ErrorCode::contract_violation: return 9;
  }
  return 1;
}

}  // namespace qks
