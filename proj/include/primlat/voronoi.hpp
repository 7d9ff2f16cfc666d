#pragma once

// Voronoi cells of integer lattices: exact SVP/CVP, relevant vectors, cell
// vertices and covering radius, and uniform sampling of the cell.

#include "primlat/exact_core.hpp"
#include "primlat/random.hpp"
#include "primlat/reduction.hpp"

#include <cstdint>

namespace primlat {

struct VoronoiCell {
  IntLattice lattice;
  std::vector<IntVec> relevant;       // coefficient vectors, sorted
  std::vector<RationalVec> vertices;  // basis coordinates, sorted
  Rational rho_sq;
};

// Shortest nonzero lattice vector (ambient); among several, the
// lexicographically smallest.
IntVec shortest_vector(const IntLattice& lattice);

// Coefficients of a lattice point nearest to target; ties go to the
// lexicographically smallest coefficient vector. Throws
// std::invalid_argument if target is not in the span of the lattice.
IntVec closest_vector(const IntLattice& lattice, const RationalVec& target);

// Relevant vectors as coefficient vectors of the Gram matrix.
std::vector<IntVec> relevant_coefficients(const IntMatrix& gram);
// Relevant vectors as ambient lattice vectors. Throws for rank > 4.
std::vector<IntVec> relevant_vectors(const IntLattice& lattice);

VoronoiCell voronoi_cell(const IntLattice& lattice);
Rational covering_radius_sq(const IntMatrix& gram);
Rational covering_radius(const IntLattice& lattice);  // returns rho^2

// target - closest lattice point.
RationalVec reduce_to_cell(const IntLattice& lattice, const RationalVec& target);

// Uniform points of the Voronoi cell, in basis coordinates.
class CellSampler {
 public:
  explicit CellSampler(const VoronoiCell& cell);

  // Fills coeffs (size rank) and returns the squared norm of the point.
  double sample(CounterRng& rng, RealVec& coeffs) const;
  double rho_sq() const { return rho_sq_; }
  std::size_t rank() const { return gram_.size(); }

 private:
  RealMatrix gram_;
  RealMatrix relevant_;    // coefficient vectors
  RealMatrix relevant_g_;  // G r
  RealVec half_norm_;      // r^T G r / 2
  double rho_sq_ = 0;
};

// A uniform point of the cell (ambient coordinates) drawn from the stream
// derived from (seed, lattice hash).
RealVec sample_cell(const IntLattice& lattice, std::uint64_t seed);

}  // namespace primlat
