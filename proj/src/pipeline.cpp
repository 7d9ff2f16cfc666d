#include "primlat/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace primlat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kConfigKeys = {
    "n",         "radius",   "seed",           "alpha_grid", "caps",       "truncation", "sigma", "threads",
    "output_dir", "epsilons", "shells", "histogram_bins", "max_shapes", "mc_samples", "ks_tolerance"};

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("invalid value for '") + key + "'");
  }
}

void check_sorted_unit(const std::vector<double>& g, const char* what) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] >= 0 && g[i] <= 1)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
    if (i > 0 && g[i] < g[i - 1]) throw ConfigError(std::string(what) + " must be sorted");
  }
}

void append_joined(std::string& out, const std::int64_t* v, std::size_t k) {
  char buf[32];
  for (std::size_t i = 0; i < k; ++i) {
    if (i) out.push_back(';');
    const auto r = std::to_chars(buf, buf + sizeof buf, v[i]);
    out.append(buf, r.ptr);
  }
}

void append_joined(std::string& out, const double* v, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    if (i) out.push_back(';');
    out += format_double(v[i]);
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

template <typename T>
bool parse_list(std::string_view s, T* out, std::size_t k) {
  if (k == 0) return s.empty();
  const auto parts = split(s, ';');
  if (parts.size() != k) return false;
  for (std::size_t i = 0; i < k; ++i)
    if (!parse_number(parts[i], out[i])) return false;
  return true;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

json nu_json(const NuEstimate& est, std::span<const double> alphas) {
  json cdf = json::array(), err = json::array();
  for (double a : alphas) {
    const auto it = std::lower_bound(est.alphas.begin(), est.alphas.end(), a);
    const std::size_t j = std::min(static_cast<std::size_t>(it - est.alphas.begin()), est.alphas.size() - 1);
    cdf.push_back(nu_cdf_at(est, a));
    err.push_back(est.stderr_[j]);
  }
  return {{"alphas", alphas}, {"cdf", cdf}, {"stderr", err}, {"shapes", est.shapes}, {"source", est.source}};
}

json ks_json(double statistic, double n_eff, double tolerance) {
  const double critical = ks_critical(0.01, n_eff);
  const double threshold = std::max(critical, tolerance);
  return {{"statistic", statistic},
          {"threshold", threshold},
          {"critical_value", critical},
          {"tolerance", tolerance},
          {"level", 0.01},
          {"effective_count", n_eff},
          {"p_value", kolmogorov_sf(statistic * std::sqrt(n_eff))},
          {"pass", statistic <= threshold}};
}

// Fine grid for the KS comparison, merged with the configured grid.
std::vector<double> analysis_grid(const std::vector<double>& configured) {
  std::vector<double> g = uniform_grid(101);
  g.insert(g.end(), configured.begin(), configured.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (n < kMinDimension || n > kMaxDimension) throw ConfigError("unsupported dimension");
  if (!(radius >= 2) || !std::isfinite(radius)) throw ConfigError("radius must be at least 2");
  if (alpha_grid.empty()) throw ConfigError("alpha_grid must not be empty");
  check_sorted_unit(alpha_grid, "alpha_grid");
  for (const auto& c : caps) {
    if (!(c.fraction > 0 && c.fraction < 1)) throw ConfigError("cap fraction must lie in (0, 1)");
    if (!c.axis.empty()) {
      if (c.axis.size() != n) throw ConfigError("cap axis has the wrong dimension");
      double s = 0;
      for (double a : c.axis) s += a * a;
      if (!(s > 0) || !std::isfinite(s)) throw ConfigError("cap axis must be a nonzero vector");
    }
  }
  if (truncation.size() > n - 2) throw ConfigError("truncation has more than n - 2 entries");
  if (sigma.size() > n - 2) throw ConfigError("sigma has more than n - 2 entries");
  for (double s : sigma)
    if (!(s > 0)) throw ConfigError("sigma entries must be positive");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  for (double e : epsilons)
    if (!(e >= 0)) throw ConfigError("epsilons must be non-negative");
  for (std::size_t i = 1; i < shells.size(); ++i)
    if (!(shells[i] > shells[i - 1])) throw ConfigError("shells must be increasing");
  if (shells.size() == 1) throw ConfigError("shells needs at least two edges");
  if (histogram_bins == 0) throw ConfigError("histogram_bins must be positive");
  if (mc_samples == 0) throw ConfigError("mc_samples must be positive");
  if (ks_tolerance && !(*ks_tolerance >= 0)) throw ConfigError("ks_tolerance must be non-negative");
}

std::vector<Cap> ExperimentConfig::resolve_caps() const {
  std::vector<Cap> out;
  std::uint64_t random_index = 0;
  for (const auto& c : caps) {
    if (c.axis.empty()) {
      out.push_back(random_cap(n, c.fraction, seed, random_index++));
    } else {
      RealVec axis = c.axis;
      double s = 0;
      for (double a : axis) s += a * a;
      for (double& a : axis) a /= std::sqrt(s);
      out.push_back(cap_with_fraction(std::move(axis), c.fraction));
    }
  }
  return out;
}

std::vector<double> ExperimentConfig::shell_edges() const {
  if (!shells.empty()) return shells;
  return {radius / 8, radius / 4, radius / 2, radius};
}

NuOptions ExperimentConfig::nu_options() const {
  NuOptions o;
  o.seed = seed;
  o.max_shapes = max_shapes > 0 ? max_shapes : (n <= 3 ? 200'000 : 1'000);
  o.mc_samples = mc_samples;
  o.threads = resolve_threads(threads);
  return o;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end())
      throw ConfigError("unknown config key '" + key + "'");
  ExperimentConfig c;
  if (j.contains("n")) c.n = get_field<std::size_t>(j, "n");
  if (j.contains("radius")) c.radius = get_field<double>(j, "radius");
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("alpha_grid")) c.alpha_grid = get_field<std::vector<double>>(j, "alpha_grid");
  if (j.contains("truncation")) c.truncation = get_field<std::vector<double>>(j, "truncation");
  if (j.contains("sigma")) c.sigma = get_field<std::vector<double>>(j, "sigma");
  if (j.contains("threads")) c.threads = get_field<int>(j, "threads");
  if (j.contains("output_dir")) c.output_dir = get_field<std::string>(j, "output_dir");
  if (j.contains("epsilons")) c.epsilons = get_field<std::vector<double>>(j, "epsilons");
  if (j.contains("shells")) c.shells = get_field<std::vector<double>>(j, "shells");
  if (j.contains("histogram_bins")) c.histogram_bins = get_field<std::size_t>(j, "histogram_bins");
  if (j.contains("max_shapes")) c.max_shapes = get_field<std::size_t>(j, "max_shapes");
  if (j.contains("mc_samples")) c.mc_samples = get_field<std::size_t>(j, "mc_samples");
  if (j.contains("ks_tolerance")) c.ks_tolerance = get_field<double>(j, "ks_tolerance");
  if (j.contains("caps")) {
    if (!j["caps"].is_array()) throw ConfigError("invalid value for 'caps'");
    for (const auto& cj : j["caps"]) {
      if (!cj.is_object()) throw ConfigError("invalid cap spec");
      CapSpec spec;
      if (cj.contains("fraction")) spec.fraction = get_field<double>(cj, "fraction");
      if (cj.contains("axis")) {
        spec.axis = get_field<std::vector<double>>(cj, "axis");
        c.caps.push_back(spec);
      } else {
        const auto count = cj.contains("random") ? get_field<std::size_t>(cj, "random") : 1;
        for (std::size_t k = 0; k < count; ++k) c.caps.push_back(spec);
      }
    }
  } else {
    c.caps.assign(10, CapSpec{});
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json caps = json::array();
  for (const auto& cap : c.caps) {
    json cj = {{"fraction", cap.fraction}};
    if (!cap.axis.empty()) cj["axis"] = cap.axis;
    caps.push_back(cj);
  }
  return {{"n", c.n},
          {"radius", c.radius},
          {"seed", c.seed},
          {"alpha_grid", c.alpha_grid},
          {"caps", caps},
          {"truncation", c.truncation},
          {"sigma", c.sigma},
          {"threads", c.threads},
          {"output_dir", c.output_dir.string()},
          {"epsilons", c.epsilons},
          {"shells", c.shells},
          {"histogram_bins", c.histogram_bins},
          {"max_shapes", c.max_shapes},
          {"mc_samples", c.mc_samples},
          {"ks_tolerance", c.ks_tolerance_or_default()}};
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + path.string());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string csv_row(const Observation& o) {
  const std::size_t n = o.n;
  std::string row;
  row.reserve(256);
  row += std::to_string(n);
  row += ',';
  append_joined(row, o.v, n);
  row += ',';
  row += format_double(o.norm_v);
  row += ',';
  double dir[kMaxDimension];
  for (std::size_t i = 0; i < n; ++i) dir[i] = static_cast<double>(o.v[i]) / o.norm_v;
  append_joined(row, dir, n);
  row += ',';
  append_joined(row, o.w, n);
  for (double x : {o.norm_w, o.rho, o.ratio, o.ratio_perp, o.ratio_naive}) {
    row += ',';
    row += format_double(x);
  }
  row += ',';
  append_joined(row, o.s, n - 2);
  row += ',';
  append_joined(row, o.x, n - 1);
  row += ',';
  row += std::to_string(o.flags);
  return row;
}

void write_records(std::ostream& out, const std::vector<Observation>& records) {
  for (const auto& o : records) out << csv_row(o) << '\n';
}

std::vector<Observation> read_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty record file");
  if (line != kCsvHeader) throw DataError("schema mismatch: unexpected header");
  std::vector<Observation> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto bad = [&](const std::string& why) {
      return DataError("schema mismatch at line " + std::to_string(lineno) + ": " + why);
    };
    const auto f = split(line, ',');
    if (f.size() != 13) throw bad("expected 13 columns");
    Observation o;
    unsigned n = 0;
    if (!parse_number(f[0], n) || n < kMinDimension || n > kMaxDimension) throw bad("invalid n");
    if (!out.empty() && out.front().n != n) throw bad("mixed dimensions");
    o.n = static_cast<std::uint8_t>(n);
    double dir[kMaxDimension];
    unsigned flags = 0;
    if (!parse_list(f[1], o.v, n) || !parse_number(f[2], o.norm_v) || !parse_list(f[3], dir, n) ||
        !parse_list(f[4], o.w, n) || !parse_number(f[5], o.norm_w) || !parse_number(f[6], o.rho) ||
        !parse_number(f[7], o.ratio) || !parse_number(f[8], o.ratio_perp) || !parse_number(f[9], o.ratio_naive) ||
        !parse_list(f[10], o.s, n - 2) || !parse_list(f[11], o.x, n - 1) || !parse_number(f[12], flags))
      throw bad("unparsable field");
    o.flags = static_cast<std::uint8_t>(flags);
    const std::span<const std::int64_t> v(o.v, n);
    if (!is_primitive(to_intvec(v))) throw bad("v is not primitive");
    std::int64_t vv = 0;
    for (std::int64_t e : v) vv += e * e;
    o.norm_sq = vv;
    if (fast_path_supported(v)) {
      // Cheap to recompute: check the row and recover the shape data the
      // CSV does not carry.
      const Observation ref = observe_fast(v);
      if (!std::equal(ref.w, ref.w + n, o.w) || ref.flags != o.flags) throw bad("record disagrees with v");
      std::copy(std::begin(ref.a), std::end(ref.a), o.a);
      std::copy(std::begin(ref.nij), std::end(ref.nij), o.nij);
    } else {
      std::int64_t dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += o.v[i] * o.w[i];
      if (dot != 1) throw bad("<v, w> != 1");
    }
    out.push_back(o);
  }
  if (out.empty()) throw DataError("empty record file");
  return out;
}

std::vector<Observation> read_records(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_records(in);
}

// ---------------------------------------------------------------------------

EnumerateSummary run_enumerate(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ensure_dir(config.output_dir);
  const fs::path csv_path = config.output_dir / "records.csv";
  auto out = open_output(csv_path);
  out << kCsvHeader << '\n';

  const int threads = resolve_threads(config.threads);
  EnumerateSummary sum;
  std::vector<Observation> obs;
  std::string buffer;
  enumerate_primitive(config.n, config.radius, EnumerationMode::full, [&](const PrimitiveBlock& block) {
    obs.clear();
    observe_block_parallel(block, obs, threads);
    buffer.clear();
    for (const auto& o : obs) {
      buffer += csv_row(o);
      buffer += '\n';
      ++sum.records;
      if (o.flags & kUnitVector) ++sum.unit_vectors;
      if (o.flags & kCvpTie) ++sum.cvp_ties;
    }
    out << buffer;
  });
  out.flush();
  if (!out) throw IoError("write failed for " + csv_path.string());
  sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const json manifest = {{"version", kVersion},
                         {"csv_schema_version", kCsvSchemaVersion},
                         {"records_file", "records.csv"},
                         {"config", config_to_json(config)},
                         {"threads", threads},
                         {"counts",
                          {{"records", sum.records}, {"unit_vectors", sum.unit_vectors}, {"cvp_ties", sum.cvp_ties}}},
                         {"wall_time_seconds", sum.wall_seconds}};
  write_json(config.output_dir / "manifest.json", manifest);
  return sum;
}

void write_histogram(const fs::path& path, const std::vector<HistogramBin>& bins) {
  auto out = open_output(path);
  out << "bin_left,bin_right,value,stderr\n";
  for (const auto& b : bins)
    out << format_double(b.left) << ',' << format_double(b.right) << ',' << format_double(b.value) << ','
        << format_double(b.stderr_) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<HistogramBin> ratio_histogram(const std::vector<Observation>& records, std::size_t bins) {
  std::vector<double> mass(bins, 0.0), mass_sq(bins, 0.0);
  double total = 0;
  for (const auto& o : records) {
    if (o.flags & kUnitVector) continue;
    total += o.weight;
    if (o.ratio >= 1) continue;
    const auto b = std::min(static_cast<std::size_t>(o.ratio * static_cast<double>(bins)), bins - 1);
    mass[b] += o.weight;
    mass_sq[b] += static_cast<double>(o.weight) * o.weight;
  }
  std::vector<HistogramBin> out;
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    HistogramBin h;
    h.left = static_cast<double>(b) * width;
    h.right = static_cast<double>(b + 1) * width;
    if (total > 0) {
      h.value = mass[b] / (total * width);
      h.stderr_ = std::sqrt(mass_sq[b]) / (total * width);
    }
    out.push_back(h);
  }
  return out;
}

std::vector<Observation> observe_orbits(std::size_t n, double radius, int threads) {
  std::vector<Observation> out;
  enumerate_primitive(n, radius, EnumerationMode::orbits,
                      [&](const PrimitiveBlock& block) { observe_block_parallel(block, out, threads); });
  return out;
}

json run_analyze(const ExperimentConfig& config, const fs::path& records_path) {
  config.validate();
  const std::vector<Observation> records = read_records(records_path);
  const std::size_t n = records.front().n;
  if (n != config.n) throw DataError("record file has n = " + std::to_string(n) + ", config has " + std::to_string(config.n));
  double max_norm = 0;
  for (const auto& o : records) max_norm = std::max(max_norm, o.norm_v);
  if (max_norm > config.radius * (1 + 1e-12)) throw DataError("records exceed the configured radius");
  ensure_dir(config.output_dir);

  const NuOptions nu_opt = config.nu_options();
  json report = {{"version", kVersion}, {"n", n}, {"radius", config.radius}, {"seed", config.seed},
                 {"records", records.size()}};

  // Law of |w| / rho.
  const auto grid = analysis_grid(config.alpha_grid);
  const NuEstimate nu = nu_estimate(records, grid, nu_opt);
  report["nu_estimate"] = nu_json(nu, config.alpha_grid);
  std::vector<double> ratios, weights;
  for (const auto& o : records) {
    if (o.norm_v < 2) continue;
    ratios.push_back(o.ratio);
    weights.push_back(o.weight);
  }
  report["ks_n2"] = nullptr;
  report["ks_nu"] = nullptr;
  if (!ratios.empty()) {
    const EmpiricalCDF F(std::move(ratios), std::move(weights));
    if (n == 2) {
      report["ks_n2"] = ks_json(ks_statistic(F, [](double a) { return std::clamp(a, 0.0, 1.0); }), F.effective_count(),
                               config.ks_tolerance_or_default());
    } else {
      report["ks_nu"] = ks_json(ks_statistic(F, [&](double a) { return nu_cdf_at(nu, a); }), F.effective_count(),
                               config.ks_tolerance_or_default());
    }
  }

  // Directions.
  const auto caps = config.resolve_caps();
  json directions = json::array();
  for (std::size_t k = 0; k < caps.size(); ++k) {
    const DirectionResult d = direction_uniformity(records, caps[k]);
    directions.push_back({{"cap", k},
                          {"axis", caps[k].axis},
                          {"fraction", caps[k].measure_fraction()},
                          {"observed", d.observed},
                          {"expected", d.expected},
                          {"z_score", d.z_score}});
  }
  report["direction_uniformity"] = directions;

  // Joint counts at T = log R.
  const double T = std::log(config.radius);
  json joint = json::array();
  auto add_joint = [&](double alpha, std::optional<std::size_t> cap) {
    JointQuery q;
    q.T = T;
    q.alpha = alpha;
    q.truncation = config.truncation;
    if (cap) q.cap = caps[*cap];
    const JointCountResult r = joint_count(records, config.radius, q, nu_opt, &nu);
    joint.push_back({{"T", T},
                     {"alpha", alpha},
                     {"cap", cap ? json(*cap) : json(nullptr)},
                     {"count", r.count},
                     {"main_term", r.main_term},
                     {"relative_error", r.relative_error},
                     {"shape_average", r.shape_integral}});
  };
  for (double a : config.alpha_grid) add_joint(a, std::nullopt);
  for (std::size_t k = 0; k < caps.size(); ++k) add_joint(1.0, k);
  report["joint_counts"] = joint;

  report["shell_scan"] = json::array();
  report["cusp"] = nullptr;
  report["conditional_uniformity"] = nullptr;
  if (n >= 3) {
    const auto edges = config.shell_edges();
    for (const auto& row : shell_scan(records, config.epsilons, edges))
      report["shell_scan"].push_back({{"lo", row.lo},
                                          {"hi", row.hi},
                                          {"weight", row.weight},
                                          {"epsilons", config.epsilons},
                                          {"fraction_above", row.fraction_above},
                                          {"median", row.median}});

    std::vector<double> sigma = config.sigma;
    if (sigma.empty()) sigma.assign(n - 2, 0.5);
    std::vector<double> t_grid;
    const double t0 = std::log(std::min(10.0, config.radius / 2));
    for (int k = 0; k <= 10; ++k) t_grid.push_back(t0 + (T - t0) * k / 10.0);
    const CuspResult cusp = cusp_scan(records, t_grid, sigma);
    report["cusp"] = {{"sigma", sigma},
                      {"T", cusp.T},
                      {"counts", cusp.counts},
                      {"exponent_fit", cusp.exponent_fit},
                      {"fitted_points", cusp.fitted_points}};
  }
  if (n == 3) {
    std::vector<Observation> sample;
    for (const auto& o : records)
      if (is_orbit_sample(std::span<const std::int64_t>(o.v, o.n), config.seed)) sample.push_back(o);
    const ConditionalUniformity cu =
        conditional_uniformity(sample, kUniformityS1Edges, kUniformityN12Edges, 4, 500, 0.01);
    json bins = json::array();
    for (const auto& b : cu.bins)
      bins.push_back({{"s_lo", b.s_lo},
                      {"s_hi", b.s_hi},
                      {"n12_lo", b.n_lo},
                      {"n12_hi", b.n_hi},
                      {"records", b.records},
                      {"statistic", b.statistic},
                      {"p_value", b.p_value}});
    report["conditional_uniformity"] = {
        {"records", sample.size()}, {"tested", cu.tested}, {"passed", cu.passed}, {"bins", bins}};
  }

  // rho against the last Gram-Schmidt length, logged only.
  double lo = INFINITY, hi = 0;
  for (const auto& o : records) {
    const double am = o.a[o.n - 2];
    if (am <= 0 || (o.flags & kUnitVector)) continue;
    lo = std::min(lo, o.rho / am);
    hi = std::max(hi, o.rho / am);
  }
  report["rho_over_last_gs"] = hi > 0 ? json{{"min", lo}, {"max", hi}} : json(nullptr);

  write_histogram(config.output_dir / "nu_density.csv", nu_density(nu, config.histogram_bins));
  write_histogram(config.output_dir / "ratio_density.csv", ratio_histogram(records, config.histogram_bins));
  report["histograms"] = {{"nu_density", "nu_density.csv"}, {"ratio_density", "ratio_density.csv"}};
  write_json(config.output_dir / "report.json", report);
  return report;
}

}  // namespace primlat
