#pragma once

// Goodness-of-fit machinery and the counting experiments: direction caps,
// joint counts with their main terms, cusp excursions, sublattice counts and
// the decay of |w_v| / |v| across shells.

#include "primlat/kernels.hpp"
#include "primlat/measure.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace primlat {

// Leb(S^k), the k-dimensional area of the unit sphere in R^{k+1}.
double sphere_area(std::size_t k);
double ball_volume(std::size_t n);
double riemann_zeta(double s);

struct CountingConstants {
  std::size_t n = 0;
  double tau_n = 0;
  double eta_n = 0;
  double lambda_n = 0;
  int iota = 0;               // iota(n - 1)
  double zeta_product = 0;    // prod_{i=2}^{n} zeta(i)
  std::vector<double> sphere_areas;  // Leb(S^1), ..., Leb(S^{n-1})

  static CountingConstants for_dimension(std::size_t n);

  // Haar volume of the space of unimodular rank-(n-1) shapes in the
  // normalization of the joint count main term.
  double shape_space_volume() const;
  // Asymptotic number of primitive vectors of norm <= R divided by R^n.
  double primitive_density() const;
};

class EmpiricalCDF {
 public:
  EmpiricalCDF() = default;
  // Weights default to 1. Throws std::invalid_argument on size mismatch.
  explicit EmpiricalCDF(std::vector<double> values, std::vector<double> weights = {});

  double operator()(double x) const;  // weighted fraction of values <= x
  std::size_t count() const { return values_.size(); }
  double total_weight() const { return total_; }
  double effective_count() const;
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& cumulative() const { return cum_; }  // cum_[i] = weight of values_[0..i]
  double quantile(double p) const;

 private:
  std::vector<double> values_;
  std::vector<double> cum_;
  double total_ = 0;
  double sum_sq_ = 0;
};

// sup_x |F_n(x) - F(x)|. Throws std::invalid_argument on an empty sample.
double ks_statistic(const EmpiricalCDF& sample, const std::function<double(double)>& cdf);

// P(K > lambda) for the asymptotic Kolmogorov distribution.
double kolmogorov_sf(double lambda);
// Critical KS distance at the given level for an effective sample size.
double ks_critical(double level, double effective_count);

double chi_square_sf(double statistic, double dof);

struct Cap {
  RealVec axis;  // unit vector
  double angle = 0;

  bool contains(std::span<const double> u) const;
  double measure_fraction() const;
};

// Normalized surface measure of a cap of angular radius theta on S^{n-1}.
double cap_fraction(std::size_t n, double theta);
Cap cap_with_fraction(RealVec axis, double fraction);
Cap random_cap(std::size_t n, double fraction, std::uint64_t seed, std::uint64_t index);

struct DirectionResult {
  double observed = 0;
  double expected = 0;
  double z_score = 0;
  double in_cap = 0;
  double total = 0;
};

class DirectionCounter {
 public:
  explicit DirectionCounter(Cap cap) : cap_(std::move(cap)) {}
  void add(std::span<const std::int64_t> v, double weight = 1);
  void merge(const DirectionCounter& other);
  DirectionResult result() const;

 private:
  Cap cap_;
  double in_ = 0;
  double total_ = 0;
};

// Throws std::invalid_argument on an empty record set.
DirectionResult direction_uniformity(std::span<const Observation> records, const Cap& cap);

struct JointQuery {
  double T = 0;
  std::optional<Cap> cap;          // full sphere when empty
  std::vector<double> truncation;  // S_1..S_{n-2}; empty or +inf entries disable
  double alpha = 1;
};

struct JointCountResult {
  double count = 0;
  double main_term = 0;
  double relative_error = 0;
  double shape_integral = 0;  // empirical int_E L_alpha, normalized by the shape-space volume
};

// Records must form a complete enumeration to enumeration_radius >= e^T.
// Without truncation the shape average is nu-hat([0, alpha]); pass an estimate
// to reuse it instead of recomputing L_alpha over the shapes.
JointCountResult joint_count(std::span<const Observation> records, double enumeration_radius,
                             const JointQuery& query, const NuOptions& options,
                             const NuEstimate* nu = nullptr);

// Main term of the joint count for a given average of L_alpha over shapes.
double joint_main_term(std::size_t n, double T, double cap_fraction, double shape_average);

struct CuspResult {
  std::vector<double> T;
  std::vector<double> counts;
  double exponent_fit = 0;  // least-squares slope of log count against T
  std::size_t fitted_points = 0;
};

// Weighted count of records with |v| <= e^T and s_i >= sigma_i T for some i.
double cusp_count(std::span<const Observation> records, double T, std::span<const double> sigma);
CuspResult cusp_scan(std::span<const Observation> records, std::span<const double> T_grid,
                     std::span<const double> sigma);

struct CovolWindow {
  double lo = 0;
  double hi = std::numeric_limits<double>::infinity();
};

// Rank n-1 sublattices of Z^n with covolume <= X whose partial flags (of a
// reduced basis) satisfy covol(L^i) in windows[i-1]. n <= 3 and X <= 60.
std::uint64_t sublattice_count_oracle(std::size_t n, double X, std::span<const CovolWindow> windows);

struct ShellRow {
  double lo = 0;
  double hi = 0;
  double weight = 0;
  std::vector<double> fraction_above;  // one per epsilon
  double median = 0;
};

// Shells (R_k, R_{k+1}] of |v|; statistic is ratio_naive. Throws for n = 2.
std::vector<ShellRow> shell_scan(std::span<const Observation> records, std::span<const double> epsilons,
                                     std::span<const double> shell_edges);

struct UniformityBin {
  double s_lo = 0, s_hi = 0, n_lo = 0, n_hi = 0;
  std::size_t records = 0;
  double statistic = 0;
  double p_value = 1;
};

struct ConditionalUniformity {
  std::vector<UniformityBin> bins;
  std::size_t tested = 0;
  std::size_t passed = 0;
};

// n = 3. Bins records by (s_1, n_12) and in each bin with at least
// min_records runs a chi-square test of x mod 1 on a grid x grid partition of
// the unit square. The test assumes independent records; pass orbit samples
// (observe_orbit_samples), not a full enumeration.
// Shape bins for the conditional test: s_1 up to the truncation 2, and n_12
// in quarters of [-1/2, 1/2].
inline constexpr double kUniformityS1Edges[] = {-0.2, 0.0, 0.2, 0.4, 0.7, 1.0, 1.5, 2.0};
inline constexpr double kUniformityN12Edges[] = {-0.5, -0.25, 0.0, 0.25, 0.5 + 1e-12};

ConditionalUniformity conditional_uniformity(std::span<const Observation> records, std::span<const double> s_edges,
                                             std::span<const double> n12_edges, std::size_t grid,
                                             std::size_t min_records, double level);

}  // namespace primlat
