// primlat: enumerate primitive vectors, analyze the records, run oracle suites.

#include "primlat/oracle.hpp"
#include "primlat/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace primlat;

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kData = 3, kAcceptance = 4 };

struct Overrides {
  std::string config;
  std::optional<std::size_t> n;
  std::optional<double> radius;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON experiment config");
    app->add_option("--n", n, "dimension");
    app->add_option("--radius", radius, "enumeration radius");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--threads", threads, "worker threads (default: PRIMLAT_THREADS, then all cores)");
    app->add_option("--out", out, "output directory");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config.empty() ? config_from_json(nlohmann::json::object()) : load_config(config);
    if (n) c.n = *n;
    if (radius) c.radius = *radius;
    if (seed) c.seed = *seed;
    if (threads) c.threads = *threads;
    if (out) c.output_dir = *out;
    c.validate();
    return c;
  }
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_enumerate(const Overrides& o) {
  const ExperimentConfig c = o.resolve();
  const EnumerateSummary s = run_enumerate(c);
  print_json({{"records", s.records},
              {"unit_vectors", s.unit_vectors},
              {"cvp_ties", s.cvp_ties},
              {"wall_time_seconds", s.wall_seconds},
              {"output", (c.output_dir / "records.csv").string()}});
  return kOk;
}

int cmd_analyze(const Overrides& o, const std::string& records) {
  const ExperimentConfig c = o.resolve();
  const fs::path path = records.empty() ? c.output_dir / "records.csv" : fs::path(records);
  const nlohmann::json report = run_analyze(c, path);
  nlohmann::json summary = {{"report", (c.output_dir / "report.json").string()}, {"records", report["records"]}};
  if (!report["ks_n2"].is_null()) summary["ks_n2"] = report["ks_n2"];
  if (!report["ks_nu"].is_null()) summary["ks_nu"] = report["ks_nu"];
  print_json(summary);
  return kOk;
}

int cmd_report(const Overrides& o) {
  const ExperimentConfig c = o.resolve();
  run_enumerate(c);
  run_analyze(c, c.output_dir / "records.csv");
  std::cout << (c.output_dir / "report.json").string() << '\n';
  return kOk;
}

int cmd_nu_estimate(const Overrides& o) {
  const ExperimentConfig c = o.resolve();
  const auto records = observe_orbits(c.n, c.radius, resolve_threads(c.threads));
  const NuEstimate est = nu_estimate(records, c.alpha_grid, c.nu_options());
  fs::create_directories(c.output_dir);
  {
    std::ofstream out(c.output_dir / "nu_estimate.csv", std::ios::binary);
    if (!out) throw IoError("cannot write " + (c.output_dir / "nu_estimate.csv").string());
    out << "alpha,cdf,stderr\n";
    for (std::size_t j = 0; j < est.alphas.size(); ++j)
      out << format_double(est.alphas[j]) << ',' << format_double(est.cdf[j]) << ',' << format_double(est.stderr_[j])
          << '\n';
  }
  write_histogram(c.output_dir / "nu_density.csv", nu_density(est, c.histogram_bins));
  double sup = 0;
  for (std::size_t j = 0; j < est.alphas.size(); ++j) sup = std::max(sup, std::abs(est.cdf[j] - est.alphas[j]));
  print_json({{"n", c.n},
              {"radius", c.radius},
              {"shapes", est.shapes},
              {"alphas", est.alphas},
              {"cdf", est.cdf},
              {"stderr", est.stderr_},
              {"sup_distance_from_uniform", sup}});
  return kOk;
}

int cmd_cusp(const Overrides& o, double t_min) {
  const ExperimentConfig c = o.resolve();
  if (c.n < 3) throw ConfigError("cusp counts need n >= 3");
  const auto records = observe_orbits(c.n, c.radius, resolve_threads(c.threads));
  std::vector<double> sigma = c.sigma;
  if (sigma.empty()) sigma.assign(c.n - 2, 0.5);
  const double T = std::log(c.radius);
  if (!(t_min < T)) throw ConfigError("--t-min must be below log(radius)");
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(t_min + (T - t_min) * k / 10.0);
  const CuspResult r = cusp_scan(records, grid, sigma);
  fs::create_directories(c.output_dir);
  std::ofstream out(c.output_dir / "cusp.csv", std::ios::binary);
  if (!out) throw IoError("cannot write " + (c.output_dir / "cusp.csv").string());
  out << "T,count\n";
  for (std::size_t i = 0; i < r.T.size(); ++i) out << format_double(r.T[i]) << ',' << format_double(r.counts[i]) << '\n';
  print_json({{"sigma", sigma}, {"T", r.T}, {"counts", r.counts}, {"exponent_fit", r.exponent_fit}});
  return kOk;
}

int cmd_oracle(const std::string& suite, std::uint64_t seed, std::size_t instances) {
  SuiteResult r;
  try {
    r = run_oracle_suite(suite, seed, instances);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << " '" << suite << "' (choose from cvp, covering, reduction, lalpha)\n";
    return kConfig;
  }
  std::printf("%-10s %9s %7s %7s  %s\n", "suite", "instances", "passed", "skipped", "result");
  std::printf("%-10s %9zu %7zu %7zu  %s\n", r.suite.c_str(), r.instances, r.passed, r.skipped, r.ok() ? "PASS" : "FAIL");
  for (const auto& f : r.failures) std::printf("  %s\n", f.c_str());
  return r.ok() ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal lattices of primitive vectors and the gcd equation"};
  app.require_subcommand(1);

  Overrides enum_o, analyze_o, report_o, nu_o, cusp_o;
  std::string records;
  std::string suite;
  std::uint64_t oracle_seed = 1;
  std::size_t instances = 1000;
  double t_min = std::log(10.0);

  enum_o.attach(app.add_subcommand("enumerate", "write records.csv and manifest.json"));
  auto* analyze = app.add_subcommand("analyze", "write report.json and histogram CSVs from a record file");
  analyze_o.attach(analyze);
  analyze->add_option("--records", records, "record file (default: <out>/records.csv)");
  auto* oracle = app.add_subcommand("oracle", "compare the library with brute force");
  oracle->add_option("--suite", suite, "cvp | covering | reduction | lalpha")->required();
  oracle->add_option("--seed", oracle_seed, "random seed");
  oracle->add_option("--instances", instances, "random instances per suite");
  nu_o.attach(app.add_subcommand("nu-estimate", "estimate the law of |w| / rho from observed shapes"));
  auto* cusp = app.add_subcommand("cusp", "count records deep in the cusp");
  cusp_o.attach(cusp);
  cusp->add_option("--t-min", t_min, "smallest T of the grid");
  report_o.attach(app.add_subcommand("report", "enumerate, then analyze"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "enumerate") return cmd_enumerate(enum_o);
    if (cmd == "analyze") return cmd_analyze(analyze_o, records);
    if (cmd == "report") return cmd_report(report_o);
    if (cmd == "nu-estimate") return cmd_nu_estimate(nu_o);
    if (cmd == "cusp") return cmd_cusp(cusp_o, t_min);
    return cmd_oracle(suite, oracle_seed, instances);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}
