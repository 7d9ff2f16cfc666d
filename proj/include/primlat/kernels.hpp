#pragma once

// Per-vector observables in a flat struct, computed either by the exact GMP
// pipeline or by the fixed-width fast paths for n = 2, 3. Block kernels come in
// a serial reference form and an OpenMP form with identical output.

#include "primlat/gcd_equation.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace primlat {

struct Observation {
  std::uint8_t n = 0;
  std::uint8_t flags = 0;
  std::uint32_t weight = 1;
  std::int64_t v[kMaxDimension] = {};
  std::int64_t w[kMaxDimension] = {};
  std::int64_t norm_sq = 0;
  double norm_v = 0;
  double norm_w = 0;
  double rho = 0;
  double ratio = 0;
  double ratio_perp = 0;
  double ratio_naive = 0;
  double s[kMaxDimension - 2] = {};
  double x[kMaxDimension - 1] = {};
  double a[kMaxDimension - 1] = {};
  double nij[6] = {};  // n_12, n_13, n_23, n_14, n_24, n_34

  std::size_t rank() const { return n - 1u; }
};

// Position of n_ij (0-based i < j) in Observation::nij.
constexpr std::size_t nij_index(std::size_t i, std::size_t j) { return j * (j - 1) / 2 + i; }

// Largest |v|^2 handled by the fixed-width paths.
inline constexpr std::int64_t kFastNormLimit = 100'000'000;

bool fast_path_supported(std::span<const std::int64_t> v);

// Fixed-width path; requires fast_path_supported(v) and v primitive.
Observation observe_fast(std::span<const std::int64_t> v);

// Exact pipeline; any supported dimension.
Observation observe_exact(std::span<const std::int64_t> v);
Observation to_observation(const GcdRecord& rec);

// Fast path when supported, exact pipeline otherwise.
Observation observe(std::span<const std::int64_t> v, std::uint32_t weight = 1);

// Both append one observation per block entry to out.
void observe_block_serial(const PrimitiveBlock& block, std::vector<Observation>& out);
void observe_block_parallel(const PrimitiveBlock& block, std::vector<Observation>& out, int threads);

// From an orbit-mode block: observes the chosen member of every orbit off the
// symmetry walls (see is_orbit_sample), weight 1.
void observe_orbit_samples(const PrimitiveBlock& block, std::uint64_t seed, std::vector<Observation>& out, int threads);

// Worker count: explicit value if positive, else PRIMLAT_THREADS, else the
// OpenMP default.
int resolve_threads(int requested);

}  // namespace primlat
