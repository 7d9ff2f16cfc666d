#pragma once

// L_alpha(L) = Leb(Dir(L) cap B(alpha * rho)) / covol(L) and estimates of
// nu_n([0, alpha]) as averages of L_alpha over observed shapes.

#include "primlat/exact_core.hpp"
#include "primlat/kernels.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace primlat {

enum class LAlphaMethod { exact_1d, exact_2d, monte_carlo };

std::string to_string(LAlphaMethod m);

struct LAlphaResult {
  double value = 0;
  LAlphaMethod method = LAlphaMethod::exact_2d;
  double stderr_ = 0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultMonteCarloSamples = 10'000;

struct Point2 {
  double x, y;
};

// Area of (polygon cap disk of radius r about the origin); polygon
// counter-clockwise.
double disk_polygon_area(std::span<const Point2> polygon, double r);

// Voronoi polygon of the rank-2 lattice with the given reduced Gram matrix
// (|g12| <= g11 / 2, g11 <= g22), in the frame b1 = (sqrt g11, 0).
std::vector<Point2> voronoi_polygon(double g11, double g12, double g22);

// L_alpha on a grid for a rank-2 lattice given by a reduced Gram matrix.
std::vector<double> l_alpha_rank2(double g11, double g12, double g22, std::span<const double> alphas);

// Throws std::invalid_argument for alpha outside [0, 1] or rank > 4.
LAlphaResult l_alpha(const IntLattice& lattice, double alpha, std::uint64_t seed,
                     std::size_t samples = kDefaultMonteCarloSamples);
// One sample set shared across the grid, so the curve is monotone.
std::vector<LAlphaResult> l_alpha_curve(const IntLattice& lattice, std::span<const double> alphas,
                                        std::uint64_t seed, std::size_t samples = kDefaultMonteCarloSamples);

// L_alpha curve of the orthogonal lattice recorded in an observation.
std::vector<LAlphaResult> l_alpha_curve(const Observation& obs, std::span<const double> alphas,
                                        std::uint64_t seed, std::size_t samples = kDefaultMonteCarloSamples);

struct NuOptions {
  std::uint64_t seed = 0;
  std::size_t max_shapes = 0;  // 0 keeps every record; else an evenly strided subset
  std::size_t mc_samples = kDefaultMonteCarloSamples;
  int threads = 1;
};

struct NuEstimate {
  std::vector<double> alphas;
  std::vector<double> cdf;
  std::vector<double> stderr_;
  std::size_t n = 0;
  std::string source = "observed-shapes";
  std::size_t shapes = 0;
};

// Throws std::invalid_argument on an empty input or a grid outside [0, 1].
NuEstimate nu_estimate(std::span<const Observation> records, std::span<const double> alphas,
                       const NuOptions& options);

// Piecewise-linear interpolation of the estimated CDF.
double nu_cdf_at(const NuEstimate& estimate, double alpha);

struct HistogramBin {
  double left = 0;
  double right = 0;
  double value = 0;
  double stderr_ = 0;
};

std::vector<HistogramBin> nu_density(const NuEstimate& estimate, std::size_t bins);

std::vector<double> uniform_grid(std::size_t points);  // points >= 2, from 0 to 1

}  // namespace primlat
