#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qks/core.hpp"
#include "qks/error.hpp"
#include "qks/oracle.hpp"
#include "qks/scheme.hpp"

namespace qks {

enum class GeneratorKind { gaussian_mixture, uniform_box, grid };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::gaussian_mixture;
  std::size_t clusters = 2;
  /// Point count (gaussian-mixture, uniform-box) or points per axis (grid).
  std::size_t n = 20;
  std::size_t dim = 2;
  /// Distance between consecutive mixture means (all on the first axis).
  double separation = 10.0;
  /// Per-coordinate standard deviation of each mixture component.
  double spread = 0.1;
  /// Side length of the uniform box, or lattice spacing of the grid.
  double extent = 1.0;
};

std::vector<Point> generate_points(const GeneratorSpec& spec, std::uint64_t seed);

struct RunConfig {
  std::string data_path;
  std::optional<GeneratorSpec> generator;
  std::uint64_t generator_seed = 0;

  std::size_t k = 2;
  double eps = 0.5;
  OracleConfig oracle;

  Preset preset = Preset::desk;
  std::optional<std::uint64_t> rho;
  std::optional<std::uint64_t> tau;
  std::optional<std::uint64_t> repetitions;
  std::uint64_t list_cap = kDefaultListCap;

  std::uint64_t seed = 0;
  std::string output;
  bool brute_force = false;
  BruteForceLimits brute_force_limits;
  /// Adds one (index, alpha_m, m, seed) record per candidate to the report.
  bool audit_candidates = false;

  SchemeParams scheme_params() const;
};

void to_json(nlohmann::json& j, const GeneratorSpec& spec);
void from_json(const nlohmann::json& j, GeneratorSpec& spec);
void to_json(nlohmann::json& j, const RunConfig& config);
void from_json(const nlohmann::json& j, RunConfig& config);

GeneratorKind parse_generator_kind(const std::string& name);
const char* to_string(GeneratorKind kind) noexcept;

/// FNV-1a over the coordinate bit patterns, as "fnv1a64:<16 hex digits>".
std::string dataset_digest(std::span<const Point> points);

/// Loads or generates the raw points named by the config.
std::vector<Point> load_points(const RunConfig& config);

/// Runs the full pipeline and returns the report. Timing values are confined
/// to the top-level "timings" object.
nlohmann::json run_experiment(const RunConfig& config);

struct SweepGrid {
  std::uint64_t first_seed = 0;
  std::uint64_t seed_count = 1;
  std::vector<double> eps_values;
  /// Oracle eps_rel values (delta for deterministic-delta oracles).
  std::vector<double> delta_values;
};

/// One report per (eps, delta, seed); failing runs yield an error record
/// instead of aborting the sweep.
std::vector<nlohmann::json> run_sweep(const RunConfig& base, const SweepGrid& grid);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Process exit status for each error category.
int exit_code(ErrorCode code) noexcept;

}  // namespace qks
