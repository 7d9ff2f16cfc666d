#pragma once

// Experiment plumbing: configuration, the records CSV, run manifests and the
// analysis report.

#include "primlat/kernels.hpp"
#include "primlat/statistics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace primlat {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCsvHeader =
    "n,v,norm_v,direction,w,norm_w,rho,ratio,ratio_perp,ratio_naive,s,x,flags";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapSpec {
  std::vector<double> axis;  // empty: random axis
  double fraction = 0.1;
};

struct ExperimentConfig {
  std::size_t n = 3;
  double radius = 20;
  std::uint64_t seed = 1;
  std::vector<double> alpha_grid = uniform_grid(11);
  std::vector<CapSpec> caps;
  std::vector<double> truncation;
  std::vector<double> sigma;
  int threads = 0;
  std::filesystem::path output_dir = "out";

  std::vector<double> epsilons = {0.05};
  std::vector<double> shells;  // empty: R/8, R/4, R/2, R
  std::size_t histogram_bins = 20;
  std::size_t max_shapes = 0;  // 0: 200000 for n <= 3, else 1000
  std::size_t mc_samples = kDefaultMonteCarloSamples;
  // KS pass threshold is max(critical value at 1%, tolerance); the tolerance
  // absorbs the O(1/|v|) finite-size bias. Default 0.005 for n = 2, else 0.02.
  std::optional<double> ks_tolerance;

  // Throws ConfigError.
  void validate() const;
  std::vector<Cap> resolve_caps() const;
  std::vector<double> shell_edges() const;
  NuOptions nu_options() const;
  double ks_tolerance_or_default() const { return ks_tolerance.value_or(n == 2 ? 0.005 : 0.02); }
};

// Throws ConfigError on unknown keys or wrong types.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);  // IoError, ConfigError

// Shortest round-trip decimal form.
std::string format_double(double x);
std::string csv_row(const Observation& o);
void write_records(std::ostream& out, const std::vector<Observation>& records);

// Parses and re-derives every row; throws DataError on a malformed file, an
// empty file, or a row that disagrees with the recomputed record.
std::vector<Observation> read_records(std::istream& in);
std::vector<Observation> read_records(const std::filesystem::path& path);

struct EnumerateSummary {
  std::uint64_t records = 0;
  std::uint64_t unit_vectors = 0;
  std::uint64_t cvp_ties = 0;
  double wall_seconds = 0;
};

// Writes records.csv and manifest.json into the output directory.
EnumerateSummary run_enumerate(const ExperimentConfig& config);

// Reads records and writes report.json plus histogram CSVs into the output
// directory. Returns the report.
nlohmann::json run_analyze(const ExperimentConfig& config, const std::filesystem::path& records_path);

void write_histogram(const std::filesystem::path& path, const std::vector<HistogramBin>& bins);

// Empirical density of ratio on [0, 1], weighted.
std::vector<HistogramBin> ratio_histogram(const std::vector<Observation>& records, std::size_t bins);

// Orbit representatives with weights up to the radius, observed with the
// configured thread count.
std::vector<Observation> observe_orbits(std::size_t n, double radius, int threads);

}  // namespace primlat
