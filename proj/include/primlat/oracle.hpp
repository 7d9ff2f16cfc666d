#pragma once

// Brute-force references for small full-rank lattices in Z^k (k <= 4) and the
// randomized suites that compare them with the library.

#include "primlat/exact_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace primlat {

// Integer points x with |x - center|^2 <= bound that lie in the lattice
// spanned by the columns of the square matrix basis. center = num / den.
std::vector<IntVec> brute_lattice_points(const IntMatrix& basis, const IntVec& center_num, long center_den,
                                         const Rational& bound);

struct BruteShortest {
  Integer norm_sq;
  std::vector<IntVec> vectors;  // ambient, sorted
};
BruteShortest brute_shortest(const IntMatrix& basis);

struct BruteClosest {
  Rational dist_sq;
  std::vector<IntVec> coefficients;  // sorted
};
// target = num / den, ambient.
BruteClosest brute_closest(const IntMatrix& basis, const IntVec& target_num, long target_den);

// Largest empty circumsphere through 0; nullopt when the search set would
// exceed max_points lattice points.
std::optional<Rational> brute_covering_radius_sq(const IntMatrix& basis, std::size_t max_points = 60);

// Rank 2: area of the Voronoi cell within radius alpha * rho, over the
// covolume, by polar quadrature.
std::optional<double> brute_l_alpha_rank2(const IntMatrix& basis, double alpha, std::size_t steps = 8192);

struct SuiteResult {
  std::string suite;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failures;  // first few, human-readable

  bool ok() const { return passed == instances && instances > 0; }
};

inline const std::vector<std::string> kOracleSuites = {"cvp", "covering", "reduction", "lalpha"};

// Throws std::invalid_argument("unknown suite") for other names.
SuiteResult run_oracle_suite(const std::string& suite, std::uint64_t seed, std::size_t instances = 1000);

// Random square basis with entries in [-bound, bound] and nonzero determinant.
IntMatrix random_basis(std::size_t k, long bound, std::uint64_t seed, std::uint64_t index);

}  // namespace primlat
