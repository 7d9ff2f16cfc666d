#include "primlat/statistics.hpp"

#include "primlat/random.hpp"
#include "primlat/reduction.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace primlat {

double riemann_zeta(double s) { return boost::math::zeta(s); }

double sphere_area(std::size_t k) {
  const double d = static_cast<double>(k + 1);
  return 2 * std::pow(M_PI, d / 2) / std::tgamma(d / 2);
}

double ball_volume(std::size_t n) {
  const double d = static_cast<double>(n);
  return std::pow(M_PI, d / 2) / std::tgamma(d / 2 + 1);
}

CountingConstants CountingConstants::for_dimension(std::size_t n) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2");
  CountingConstants c;
  c.n = n;
  const double d = static_cast<double>(n);
  c.tau_n = std::ceil((d - 1) / 2) / (4 * d * d);
  c.eta_n = d * d / (2 * d * d * d - 3 * d * d - 2 * d + 4);
  c.lambda_n = d * d / (2 * (d * d - 1));
  c.iota = primlat::iota(n - 1);
  c.zeta_product = 1;
  for (std::size_t i = 2; i <= n; ++i) c.zeta_product *= riemann_zeta(static_cast<double>(i));
  for (std::size_t k = 1; k + 1 <= n; ++k) c.sphere_areas.push_back(sphere_area(k));
  return c;
}

double CountingConstants::shape_space_volume() const {
  double num = iota;
  for (std::size_t i = 2; i + 1 <= n; ++i) num *= riemann_zeta(static_cast<double>(i));
  double den = 1;
  for (std::size_t i = 1; i + 2 <= n; ++i) den *= sphere_areas[i - 1];
  return num / den;
}

double CountingConstants::primitive_density() const { return ball_volume(n) / riemann_zeta(static_cast<double>(n)); }

// ---------------------------------------------------------------------------

EmpiricalCDF::EmpiricalCDF(std::vector<double> values, std::vector<double> weights) {
  if (!weights.empty() && weights.size() != values.size()) throw std::invalid_argument("weights do not match values");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  values_.reserve(values.size());
  cum_.reserve(values.size());
  for (std::size_t i : idx) {
    const double w = weights.empty() ? 1.0 : weights[i];
    values_.push_back(values[i]);
    total_ += w;
    sum_sq_ += w * w;
    cum_.push_back(total_);
  }
}

double EmpiricalCDF::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0;
  return cum_[static_cast<std::size_t>(it - values_.begin()) - 1] / total_;
}

double EmpiricalCDF::effective_count() const { return sum_sq_ > 0 ? total_ * total_ / sum_sq_ : 0; }

double EmpiricalCDF::quantile(double p) const {
  if (values_.empty()) throw std::invalid_argument("empty sample");
  const double target = p * total_;
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  return values_[std::min(static_cast<std::size_t>(it - cum_.begin()), values_.size() - 1)];
}

double ks_statistic(const EmpiricalCDF& sample, const std::function<double(double)>& cdf) {
  if (sample.count() == 0) throw std::invalid_argument("empty sample");
  const auto& x = sample.values();
  const auto& cum = sample.cumulative();
  const double total = sample.total_weight();
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    const double below = i == 0 ? 0 : cum[i - 1] / total;
    d = std::max({d, std::abs(cum[i] / total - f), std::abs(f - below)});
  }
  return d;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.2) return 1;
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

double ks_critical(double level, double effective_count) {
  double lo = 0.2, hi = 5;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (kolmogorov_sf(mid) > level ? lo : hi) = mid;
  }
  return (lo + hi) / 2 / std::sqrt(effective_count);
}

double chi_square_sf(double statistic, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), statistic));
}

// ---------------------------------------------------------------------------

bool Cap::contains(std::span<const double> u) const {
  double d = 0;
  for (std::size_t i = 0; i < axis.size(); ++i) d += axis[i] * u[i];
  return d >= std::cos(angle);
}

double Cap::measure_fraction() const { return cap_fraction(axis.size(), angle); }

double cap_fraction(std::size_t n, double theta) {
  if (theta <= 0) return 0;
  if (theta >= M_PI) return 1;
  if (theta > M_PI / 2) return 1 - cap_fraction(n, M_PI - theta);
  const double s = std::sin(theta);
  return 0.5 * boost::math::ibeta((static_cast<double>(n) - 1) / 2, 0.5, s * s);
}

Cap cap_with_fraction(RealVec axis, double fraction) {
  if (!(fraction > 0 && fraction < 1)) throw std::invalid_argument("cap fraction must lie in (0, 1)");
  const std::size_t n = axis.size();
  double norm = 0;
  for (double e : axis) norm += e * e;
  norm = std::sqrt(norm);
  for (double& e : axis) e /= norm;
  const double f = std::min(fraction, 1 - fraction);
  const double x = boost::math::ibeta_inv((static_cast<double>(n) - 1) / 2, 0.5, 2 * f);
  double theta = std::asin(std::sqrt(x));
  if (fraction > 0.5) theta = M_PI - theta;
  return Cap{std::move(axis), theta};
}

Cap random_cap(std::size_t n, double fraction, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(derive_stream({seed, index, 0xca9ULL}));
  RealVec axis(n);
  double norm = 0;
  do {
    norm = 0;
    for (double& e : axis) {
      const double u1 = 1 - rng.uniform(), u2 = rng.uniform();
      e = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
      norm += e * e;
    }
  } while (norm < 1e-12);
  return cap_with_fraction(std::move(axis), fraction);
}

void DirectionCounter::add(std::span<const std::int64_t> v, double weight) {
  double norm = 0;
  RealVec u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    u[i] = static_cast<double>(v[i]);
    norm += u[i] * u[i];
  }
  norm = std::sqrt(norm);
  for (double& e : u) e /= norm;
  total_ += weight;
  if (cap_.contains(u)) in_ += weight;
}

void DirectionCounter::merge(const DirectionCounter& other) {
  in_ += other.in_;
  total_ += other.total_;
}

DirectionResult DirectionCounter::result() const {
  if (total_ == 0) throw std::invalid_argument("no records");
  DirectionResult r;
  r.in_cap = in_;
  r.total = total_;
  r.observed = in_ / total_;
  r.expected = cap_.measure_fraction();
  r.z_score = (r.observed - r.expected) / std::sqrt(r.expected * (1 - r.expected) / total_);
  return r;
}

DirectionResult direction_uniformity(std::span<const Observation> records, const Cap& cap) {
  DirectionCounter counter(cap);
  for (const auto& o : records) counter.add(std::span<const std::int64_t>(o.v, o.n), o.weight);
  return counter.result();
}

// ---------------------------------------------------------------------------

namespace {

bool within_truncation(const Observation& o, std::span<const double> S) {
  for (std::size_t i = 0; i < S.size() && i + 2 < o.n; ++i)
    if (o.s[i] > S[i]) return false;
  return true;
}

RealVec direction_of(const Observation& o) {
  RealVec u(o.n);
  for (std::size_t i = 0; i < o.n; ++i) u[i] = static_cast<double>(o.v[i]) / o.norm_v;
  return u;
}

}  // namespace

double joint_main_term(std::size_t n, double T, double cap_fraction, double shape_average) {
  const CountingConstants c = CountingConstants::for_dimension(n);
  const double integral = shape_average * c.shape_space_volume();
  double flag_measure = 1;
  for (std::size_t i = 1; i + 2 <= n; ++i) flag_measure *= c.sphere_areas[i - 1];
  return cap_fraction * sphere_area(n - 1) * integral / (static_cast<double>(n) * c.zeta_product) * flag_measure /
         c.iota * std::exp(static_cast<double>(n) * T);
}

JointCountResult joint_count(std::span<const Observation> records, double enumeration_radius,
                             const JointQuery& query, const NuOptions& options, const NuEstimate* nu) {
  if (records.empty()) throw std::invalid_argument("no records");
  if (!(query.alpha >= 0 && query.alpha <= 1)) throw std::invalid_argument("alpha must lie in [0, 1]");
  const double R = std::exp(query.T);
  if (R > enumeration_radius * (1 + 1e-12)) throw std::invalid_argument("T exceeds the enumeration radius");
  const std::size_t n = records.front().n;
  const double limit = R * (1 + 1e-12);

  JointCountResult res;
  std::vector<std::size_t> shapes;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Observation& o = records[i];
    if (o.norm_v > limit) continue;
    if (!(o.flags & kUnitVector)) shapes.push_back(i);
    if (query.cap && !query.cap->contains(direction_of(o))) continue;
    if (!within_truncation(o, query.truncation)) continue;
    if (o.ratio_perp > query.alpha) continue;
    res.count += o.weight;
  }
  const bool truncated = std::any_of(query.truncation.begin(), query.truncation.end(),
                                     [](double S) { return std::isfinite(S); });
  double average = 0;
  if (nu && !truncated) {
    average = nu_cdf_at(*nu, query.alpha);
  } else {
    if (options.max_shapes > 0 && shapes.size() > options.max_shapes) {
      std::vector<std::size_t> strided;
      for (std::size_t k = 0; k < options.max_shapes; ++k) strided.push_back(shapes[k * shapes.size() / options.max_shapes]);
      shapes = std::move(strided);
    }
    double num = 0, den = 0;
    const double grid[] = {query.alpha};
    for (std::size_t i : shapes) {
      const Observation& o = records[i];
      den += o.weight;
      if (!within_truncation(o, query.truncation)) continue;
      num += o.weight * l_alpha_curve(o, grid, options.seed, options.mc_samples).front().value;
    }
    average = den > 0 ? num / den : 0;
  }
  res.shape_integral = average;
  res.main_term = joint_main_term(n, query.T, query.cap ? query.cap->measure_fraction() : 1.0, average);
  res.relative_error = res.main_term > 0 ? res.count / res.main_term - 1 : 0;
  return res;
}

double cusp_count(std::span<const Observation> records, double T, std::span<const double> sigma) {
  if (records.empty()) return 0;
  if (records.front().n < 3) throw std::invalid_argument("cusp counts need n >= 3");
  const double limit = std::exp(T) * (1 + 1e-12);
  double count = 0;
  for (const auto& o : records) {
    if (o.norm_v > limit) continue;
    for (std::size_t i = 0; i < sigma.size() && i + 2 < o.n; ++i) {
      if (o.s[i] >= sigma[i] * T) {
        count += o.weight;
        break;
      }
    }
  }
  return count;
}

CuspResult cusp_scan(std::span<const Observation> records, std::span<const double> T_grid,
                     std::span<const double> sigma) {
  CuspResult r;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double T : T_grid) {
    const double c = cusp_count(records, T, sigma);
    r.T.push_back(T);
    r.counts.push_back(c);
    if (c <= 0) continue;
    const double y = std::log(c);
    sx += T;
    sy += y;
    sxx += T * T;
    sxy += T * y;
    ++r.fitted_points;
  }
  const double k = static_cast<double>(r.fitted_points);
  if (r.fitted_points >= 2) r.exponent_fit = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return r;
}

// ---------------------------------------------------------------------------

std::uint64_t sublattice_count_oracle(std::size_t n, double X, std::span<const CovolWindow> windows) {
  if (n < 2 || n > 3) throw std::invalid_argument("sublattice oracle supports n = 2, 3");
  if (!(X >= 0) || X > 60) throw std::invalid_argument("scale too large");
  const std::size_t m = n - 1;
  std::uint64_t count = 0;
  for (const IntVec& v : enumerate_primitive(n, X)) {
    std::size_t lead = 0;
    while (v[lead] == 0) ++lead;
    if (v[lead] < 0) continue;  // v and -v share the orthogonal lattice
    const IntLattice base = orthogonal_lattice(v);
    const double norm = std::sqrt(norm_sq(v).get_d());
    for (long k = 1; static_cast<double>(k) * norm <= X * (1 + 1e-12); ++k) {
      // Hermite forms of index k: lower triangular, d_1 d_2 = k, 0 <= h < d_2.
      std::vector<IntMatrix> forms;
      if (m == 1) {
        forms.push_back(IntMatrix{{k}});
      } else {
        for (long d1 = 1; d1 <= k; ++d1) {
          if (k % d1 != 0) continue;
          const long d2 = k / d1;
          for (long h = 0; h < d2; ++h) forms.push_back(IntMatrix{{d1, 0}, {h, d2}});
        }
      }
      for (const auto& f : forms) {
        if (!windows.empty()) {
          const RealVec flags = flag_covolumes(siegel_reduce(IntLattice(base.basis() * f)));
          bool ok = true;
          for (std::size_t i = 0; i < windows.size() && i < flags.size(); ++i)
            ok = ok && flags[i] >= windows[i].lo && flags[i] <= windows[i].hi;
          if (!ok) continue;
        }
        ++count;
      }
    }
  }
  return count;
}

std::vector<ShellRow> shell_scan(std::span<const Observation> records, std::span<const double> epsilons,
                                     std::span<const double> shell_edges) {
  if (!records.empty() && records.front().n < 3) throw std::invalid_argument("shell scan needs n >= 3");
  if (shell_edges.size() < 2) throw std::invalid_argument("need at least two shell edges");
  std::vector<ShellRow> rows;
  for (std::size_t k = 0; k + 1 < shell_edges.size(); ++k) {
    ShellRow row;
    row.lo = shell_edges[k];
    row.hi = shell_edges[k + 1];
    row.fraction_above.assign(epsilons.size(), 0.0);
    std::vector<double> vals, wts;
    for (const auto& o : records) {
      if (o.flags & kUnitVector) continue;
      if (!(o.norm_v > row.lo && o.norm_v <= row.hi)) continue;
      vals.push_back(o.ratio_naive);
      wts.push_back(o.weight);
      row.weight += o.weight;
      for (std::size_t e = 0; e < epsilons.size(); ++e)
        if (o.ratio_naive > epsilons[e]) row.fraction_above[e] += o.weight;
    }
    if (row.weight > 0) {
      for (double& f : row.fraction_above) f /= row.weight;
      row.median = EmpiricalCDF(std::move(vals), std::move(wts)).quantile(0.5);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ConditionalUniformity conditional_uniformity(std::span<const Observation> records, std::span<const double> s_edges,
                                             std::span<const double> n12_edges, std::size_t grid,
                                             std::size_t min_records, double level) {
  if (s_edges.size() < 2 || n12_edges.size() < 2 || grid < 2) throw std::invalid_argument("invalid binning");
  const std::size_t ns = s_edges.size() - 1, nn = n12_edges.size() - 1;
  std::vector<std::vector<double>> cells(ns * nn, std::vector<double>(grid * grid, 0.0));
  std::vector<std::size_t> totals(ns * nn, 0);
  auto locate = [](std::span<const double> edges, double x) -> std::ptrdiff_t {
    if (x < edges.front() || x >= edges.back()) return -1;
    return std::upper_bound(edges.begin(), edges.end(), x) - edges.begin() - 1;
  };
  for (const auto& o : records) {
    if (o.n != 3) throw std::invalid_argument("conditional uniformity needs n = 3");
    const auto bs = locate(s_edges, o.s[0]);
    const auto bn = locate(n12_edges, o.nij[0]);
    if (bs < 0 || bn < 0) continue;
    const std::size_t b = static_cast<std::size_t>(bs) * nn + static_cast<std::size_t>(bn);
    std::size_t cell = 0;
    for (int i = 0; i < 2; ++i) {
      const double f = o.x[i] - std::floor(o.x[i]);
      cell = cell * grid + std::min(static_cast<std::size_t>(f * static_cast<double>(grid)), grid - 1);
    }
    cells[b][cell] += 1;
    ++totals[b];
  }
  ConditionalUniformity out;
  for (std::size_t b = 0; b < ns * nn; ++b) {
    UniformityBin bin;
    bin.s_lo = s_edges[b / nn];
    bin.s_hi = s_edges[b / nn + 1];
    bin.n_lo = n12_edges[b % nn];
    bin.n_hi = n12_edges[b % nn + 1];
    bin.records = totals[b];
    if (totals[b] >= min_records) {
      const double expect = static_cast<double>(totals[b]) / static_cast<double>(grid * grid);
      for (double c : cells[b]) bin.statistic += (c - expect) * (c - expect) / expect;
      bin.p_value = chi_square_sf(bin.statistic, static_cast<double>(grid * grid - 1));
      ++out.tested;
      if (bin.p_value >= level) ++out.passed;
    }
    out.bins.push_back(bin);
  }
  return out;
}

}  // namespace primlat
