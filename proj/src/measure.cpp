#include "primlat/measure.hpp"

#include "primlat/random.hpp"
#include "primlat/reduction.hpp"
#include "primlat/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace primlat {

namespace {

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double dotp(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

// Signed area of triangle (0, p, q) intersected with the disk.
double triangle_disk(Point2 p, Point2 q, double r) {
  const Point2 d{q.x - p.x, q.y - p.y};
  const double a = dotp(d, d);
  if (a == 0) return 0;
  const double b = dotp(p, d);
  const double c = dotp(p, p) - r * r;
  double cuts[4] = {0, 0, 0, 1};
  int k = 1;
  const double disc = b * b - a * c;
  if (disc > 0) {
    const double s = std::sqrt(disc);
    const double t1 = (-b - s) / a, t2 = (-b + s) / a;
    if (t1 > 0 && t1 < 1) cuts[k++] = t1;
    if (t2 > 0 && t2 < 1) cuts[k++] = t2;
  }
  cuts[k++] = 1;
  double area = 0;
  for (int i = 0; i + 1 < k; ++i) {
    const Point2 s{p.x + cuts[i] * d.x, p.y + cuts[i] * d.y};
    const Point2 e{p.x + cuts[i + 1] * d.x, p.y + cuts[i + 1] * d.y};
    const double tm = (cuts[i] + cuts[i + 1]) / 2;
    const Point2 m{p.x + tm * d.x, p.y + tm * d.y};
    if (dotp(m, m) < r * r) {
      area += cross(s, e) / 2;
    } else {
      area += r * r * std::atan2(cross(s, e), dotp(s, e)) / 2;
    }
  }
  return area;
}

std::vector<Point2> clip(const std::vector<Point2>& poly, Point2 normal, double offset) {
  std::vector<Point2> out;
  const std::size_t k = poly.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % k];
    const double fa = dotp(a, normal) - offset, fb = dotp(b, normal) - offset;
    if (fa <= 0) out.push_back(a);
    if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
      const double t = fa / (fa - fb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

std::vector<LAlphaResult> monte_carlo_curve(const IntLattice& lattice, std::span<const double> alphas,
                                            std::uint64_t seed, std::size_t samples) {
  const CellSampler sampler(voronoi_cell(lattice));
  CounterRng rng(derive_stream({seed, lattice.hash()}));
  std::vector<double> r(samples);
  RealVec coeffs;
  for (std::size_t i = 0; i < samples; ++i) r[i] = std::sqrt(sampler.sample(rng, coeffs) / sampler.rho_sq());
  std::sort(r.begin(), r.end());
  std::vector<LAlphaResult> out;
  for (double a : alphas) {
    LAlphaResult res;
    res.method = LAlphaMethod::monte_carlo;
    res.samples = samples;
    if (a >= 1) {
      res.value = 1;
    } else if (a > 0) {
      const auto hits = static_cast<double>(std::upper_bound(r.begin(), r.end(), a) - r.begin());
      res.value = hits / static_cast<double>(samples);
      res.stderr_ = std::sqrt(res.value * (1 - res.value) / static_cast<double>(samples));
    }
    out.push_back(res);
  }
  return out;
}

std::vector<LAlphaResult> wrap_exact(std::vector<double> values, LAlphaMethod method) {
  std::vector<LAlphaResult> out;
  for (double v : values) out.push_back({v, method, 0.0, 0});
  return out;
}

}  // namespace

std::string to_string(LAlphaMethod m) {
  switch (m) {
    case LAlphaMethod::exact_1d: return "exact-1d";
    case LAlphaMethod::exact_2d: return "exact-2d";
    case LAlphaMethod::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

double disk_polygon_area(std::span<const Point2> polygon, double r) {
  double area = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i)
    area += triangle_disk(polygon[i], polygon[(i + 1) % polygon.size()], r);
  return area;
}

std::vector<Point2> voronoi_polygon(double g11, double g12, double g22) {
  const double s = std::sqrt(g11);
  const Point2 b1{s, 0};
  const Point2 b2{g12 / s, std::sqrt(std::max(g11 * g22 - g12 * g12, 0.0)) / s};
  const double big = 4 * (std::sqrt(g11) + std::sqrt(g22));
  std::vector<Point2> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  const Point2 rel[] = {b1, b2, {b1.x + b2.x, b1.y + b2.y}, {b1.x - b2.x, b1.y - b2.y}};
  for (Point2 r : rel) {
    const double h = dotp(r, r) / 2;
    poly = clip(poly, r, h);
    poly = clip(poly, {-r.x, -r.y}, h);
  }
  return poly;
}

std::vector<double> l_alpha_rank2(double g11, double g12, double g22, std::span<const double> alphas) {
  const auto poly = voronoi_polygon(g11, g12, g22);
  double rho_sq = 0;
  for (Point2 p : poly) rho_sq = std::max(rho_sq, dotp(p, p));
  const double rho = std::sqrt(rho_sq);
  const double covol = std::sqrt(g11 * g22 - g12 * g12);
  std::vector<double> out;
  for (double a : alphas) {
    if (a <= 0) {
      out.push_back(0);
    } else if (a >= 1) {
      out.push_back(1);
    } else {
      out.push_back(std::clamp(disk_polygon_area(poly, a * rho) / covol, 0.0, 1.0));
    }
  }
  return out;
}

std::vector<LAlphaResult> l_alpha_curve(const IntLattice& lattice, std::span<const double> alphas,
                                        std::uint64_t seed, std::size_t samples) {
  for (double a : alphas) check_alpha(a);
  const std::size_t m = lattice.rank();
  if (m > kMaxReducedRank) throw std::invalid_argument("unsupported rank");
  if (m == 1) return wrap_exact(std::vector<double>(alphas.begin(), alphas.end()), LAlphaMethod::exact_1d);
  if (m == 2) {
    const ReducedBasis red = siegel_reduce(lattice);
    const IntMatrix& g = red.lattice.gram();
    return wrap_exact(l_alpha_rank2(g(0, 0).get_d(), g(0, 1).get_d(), g(1, 1).get_d(), alphas), LAlphaMethod::exact_2d);
  }
  return monte_carlo_curve(lattice, alphas, seed, samples);
}

LAlphaResult l_alpha(const IntLattice& lattice, double alpha, std::uint64_t seed, std::size_t samples) {
  const double grid[] = {alpha};
  return l_alpha_curve(lattice, grid, seed, samples).front();
}

std::vector<LAlphaResult> l_alpha_curve(const Observation& obs, std::span<const double> alphas,
                                        std::uint64_t seed, std::size_t samples) {
  for (double a : alphas) check_alpha(a);
  if (obs.n == 2) return wrap_exact(std::vector<double>(alphas.begin(), alphas.end()), LAlphaMethod::exact_1d);
  if (obs.n == 3) {
    const double g11 = obs.a[0] * obs.a[0];
    const double g12 = obs.nij[0] * g11;
    const double g22 = obs.a[1] * obs.a[1] + obs.nij[0] * obs.nij[0] * g11;
    return wrap_exact(l_alpha_rank2(g11, g12, g22, alphas), LAlphaMethod::exact_2d);
  }
  const IntLattice lattice = orthogonal_lattice(to_intvec(std::span<const std::int64_t>(obs.v, obs.n)));
  return monte_carlo_curve(lattice, alphas, seed, samples);
}

NuEstimate nu_estimate(std::span<const Observation> records, std::span<const double> alphas,
                       const NuOptions& options) {
  for (double a : alphas) check_alpha(a);
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!(records[i].flags & kUnitVector)) use.push_back(i);
  if (use.empty()) throw std::invalid_argument("no records to estimate from");
  if (options.max_shapes > 0 && use.size() > options.max_shapes) {
    std::vector<std::size_t> strided;
    for (std::size_t k = 0; k < options.max_shapes; ++k) strided.push_back(use[k * use.size() / options.max_shapes]);
    use = std::move(strided);
  }

  const std::size_t g = alphas.size();
  const std::size_t total = use.size();
  std::vector<double> sum(g, 0.0), sum_sq(g, 0.0), mc_var(g, 0.0);
  double wsum = 0, wsq = 0;
  constexpr std::size_t kChunk = 4096;
  std::vector<std::vector<LAlphaResult>> curves(kChunk);
  for (std::size_t base = 0; base < total; base += kChunk) {
    const auto len = static_cast<std::int64_t>(std::min(kChunk, total - base));
#pragma omp parallel for schedule(dynamic, 16) num_threads(options.threads)
    for (std::int64_t k = 0; k < len; ++k)
      curves[k] = l_alpha_curve(records[use[base + k]], alphas, options.seed, options.mc_samples);
    for (std::int64_t k = 0; k < len; ++k) {
      const double w = records[use[base + k]].weight;
      wsum += w;
      wsq += w * w;
      for (std::size_t j = 0; j < g; ++j) {
        const double v = curves[k][j].value;
        sum[j] += w * v;
        sum_sq[j] += w * v * v;
        mc_var[j] += w * w * curves[k][j].stderr_ * curves[k][j].stderr_;
      }
    }
  }

  NuEstimate est;
  est.alphas.assign(alphas.begin(), alphas.end());
  est.n = records[use.front()].n;
  est.shapes = total;
  const double n_eff = wsum * wsum / wsq;
  for (std::size_t j = 0; j < g; ++j) {
    const double mean = sum[j] / wsum;
    const double var = std::max(sum_sq[j] / wsum - mean * mean, 0.0);
    est.cdf.push_back(mean);
    est.stderr_.push_back(std::sqrt(var / n_eff + mc_var[j] / (wsum * wsum)));
  }
  return est;
}

double nu_cdf_at(const NuEstimate& estimate, double alpha) {
  const auto& a = estimate.alphas;
  if (alpha <= a.front()) return estimate.cdf.front();
  if (alpha >= a.back()) return estimate.cdf.back();
  const auto it = std::upper_bound(a.begin(), a.end(), alpha);
  const std::size_t j = static_cast<std::size_t>(it - a.begin());
  const double t = (alpha - a[j - 1]) / (a[j] - a[j - 1]);
  return estimate.cdf[j - 1] + t * (estimate.cdf[j] - estimate.cdf[j - 1]);
}

std::vector<HistogramBin> nu_density(const NuEstimate& estimate, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("bins must be positive");
  auto stderr_at = [&](double alpha) {
    const auto& a = estimate.alphas;
    const auto it = std::lower_bound(a.begin(), a.end(), alpha);
    const std::size_t j = std::min(static_cast<std::size_t>(it - a.begin()), a.size() - 1);
    return estimate.stderr_[j];
  };
  std::vector<HistogramBin> out;
  for (std::size_t b = 0; b < bins; ++b) {
    HistogramBin h;
    h.left = static_cast<double>(b) / static_cast<double>(bins);
    h.right = static_cast<double>(b + 1) / static_cast<double>(bins);
    const double width = h.right - h.left;
    h.value = (nu_cdf_at(estimate, h.right) - nu_cdf_at(estimate, h.left)) / width;
    h.stderr_ = std::hypot(stderr_at(h.left), stderr_at(h.right)) / width;
    out.push_back(h);
  }
  return out;
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

}  // namespace primlat
