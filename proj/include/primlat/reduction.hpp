#pragma once

// Gram-Schmidt data, greedy (successive-minima) reduction with the sign
// normalization of the fundamental domain, and refined Iwasawa coordinates of
// the matrix [v_1 | ... | v_{n-1} | w] built from a reduced basis of v^perp.

#include "primlat/exact_core.hpp"

#include <vector>

namespace primlat {

using RealVec = std::vector<double>;
using RealMatrix = std::vector<RealVec>;  // row-major

// b_j = sum_{i<j} mu[i][j] a_i phi_i + a_j phi_j
struct GramSchmidtData {
  RealMatrix phi;  // phi[j] is the j-th orthonormal direction (ambient)
  RealVec a;
  RealMatrix mu;   // mu[i][j] = n_ij for i < j, 1 on the diagonal, 0 below
};

// Same data, exact: d[j] = a_j^2 and mu[i][j] = n_ij.
struct ExactGramSchmidt {
  std::vector<Rational> d;
  std::vector<RationalVec> mu;
};

ExactGramSchmidt exact_gram_schmidt(const IntMatrix& gram);
GramSchmidtData gram_schmidt(const IntLattice& lattice);

struct ReducedBasis {
  IntLattice lattice;
  GramSchmidtData gsd;
  ExactGramSchmidt exact;
  IntMatrix transform;  // reduced basis = original basis * transform, det +1
};

// 1 when m is odd, 2 when m is even.
int iota(std::size_t m);

inline constexpr std::size_t kMaxReducedRank = 4;

// Throws std::invalid_argument("unsupported rank") for rank > 4.
ReducedBasis siegel_reduce(const IntLattice& lattice);

// covol of the partial flags: a_1, a_1 a_2, ..., prod a_j.
RealVec flag_covolumes(const ReducedBasis& reduced);

// Upper-triangular determinant-one matrix z with z_ij = a_i n_ij / covol^{1/m}.
RealMatrix shape(const IntLattice& lattice);
RealMatrix shape_of(const ReducedBasis& reduced);

struct RICoords {
  RealVec u;   // v / |v|
  double t = 0;  // log |v|
  RealVec s;   // n-2 covolume deficiencies
  RealMatrix z;
  RealVec x;   // coefficients of w_perp in the reduced basis
  RationalVec x_exact;
  RationalVec w_perp;
  ReducedBasis reduced;
};

// Throws std::domain_error("not in G_v") unless <v, w> = 1.
RICoords refined_iwasawa(const IntVec& v, const IntVec& w);
RICoords refined_iwasawa(const IntVec& v, const IntVec& w, const ReducedBasis& reduced);

// k * a'' * a' * n'' * n' assembled from the coordinates; equals the matrix
// [reduced basis | w] up to rounding.
RealMatrix reconstruct(const RICoords& ri);

}  // namespace primlat
