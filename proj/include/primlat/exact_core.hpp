#pragma once

// Exact integer and rational linear algebra over GMP: vectors, column-basis
// lattices, Hermite normal form, kernels and the gcd equation.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace primlat {

using Integer = mpz_class;
using Rational = mpq_class;
using IntVec = std::vector<Integer>;
using RationalVec = std::vector<Rational>;

IntVec make_intvec(std::initializer_list<long> entries);
IntVec to_intvec(std::span<const std::int64_t> entries);
RationalVec to_rational(const IntVec& v);
std::string to_string(const IntVec& v);

Integer dot(const IntVec& a, const IntVec& b);
Rational dot(const RationalVec& a, const RationalVec& b);
Integer norm_sq(const IntVec& v);
Rational norm_sq(const RationalVec& v);
std::vector<double> to_double(const RationalVec& v);
std::vector<double> to_double(const IntVec& v);

// Dense integer matrix, row-major storage. Lattice bases are stored as columns.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_columns(const std::vector<IntVec>& columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntVec column(std::size_t c) const;
  IntVec row(std::size_t r) const;
  void set_column(std::size_t c, const IntVec& v);
  void swap_columns(std::size_t a, std::size_t b);
  void negate_column(std::size_t c);
  // col[dst] += k * col[src]
  void add_column_multiple(std::size_t dst, std::size_t src, const Integer& k);

  IntMatrix transpose() const;
  IntMatrix with_column(const IntVec& v) const;  // appends v as a new last column

  bool operator==(const IntMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVec operator*(const IntMatrix& a, const IntVec& x);

// Fraction-free (Bareiss) determinant of a square matrix.
Integer determinant(const IntMatrix& m);

// Exact solve of a square rational system; nullopt when singular.
std::optional<RationalVec> solve(std::vector<RationalVec> a, RationalVec b);

struct HnfResult {
  IntMatrix h;          // h = m * transform, column echelon form
  IntMatrix transform;  // unimodular
  std::size_t rank = 0;
};

// Column-style Hermite normal form. Pivot rows descend, pivots are positive,
// entries left of a pivot lie in [0, pivot), zero columns are moved to the
// right. The column span over Z is preserved.
HnfResult hnf_with_transform(const IntMatrix& m);
IntMatrix hnf(const IntMatrix& m);

Integer gcd_of(const IntVec& v);

/// True iff the gcd of the entries is 1. Throws std::invalid_argument for the
/// zero vector.
bool is_primitive(const IntVec& v);

/// Some w0 with <v, w0> = 1, built by iterated extended Euclid over the
/// entries. Throws std::domain_error("equation unsolvable") if v is not
/// primitive.
IntVec particular_solution(const IntVec& v);

// A full-rank set of integer column vectors with exact Gram data.
class IntLattice {
 public:
  IntLattice() = default;
  // Throws std::invalid_argument if the columns are linearly dependent.
  explicit IntLattice(IntMatrix basis);

  std::size_t dim() const { return basis_.rows(); }
  std::size_t rank() const { return basis_.cols(); }
  const IntMatrix& basis() const { return basis_; }
  const IntMatrix& gram() const { return gram_; }
  const Integer& covol_sq() const { return covol_sq_; }
  IntVec column(std::size_t j) const { return basis_.column(j); }

  // sum_j coeffs[j] * b_j
  IntVec combine(const IntVec& coeffs) const;
  RationalVec combine(const RationalVec& coeffs) const;

  // Coefficients y with basis * y == target, or nullopt if target is not in
  // the real span of the basis.
  std::optional<RationalVec> coordinates(const RationalVec& target) const;

  // Deterministic 64-bit digest of the basis entries.
  std::uint64_t hash() const;

 private:
  IntMatrix basis_;
  IntMatrix gram_;
  Integer covol_sq_;
};

/// Oriented integer basis of Z^n ∩ v^⊥ with det([basis | v]) = |v|^2 > 0.
/// Throws std::domain_error if v is not primitive.
IntLattice orthogonal_lattice(const IntVec& v);

/// Squared covolume, i.e. the Gram determinant.
Integer gram_det(const IntLattice& lattice);

// Nearest integer, halves rounded up: round(x) = floor(x + 1/2).
Integer round_nearest(const Rational& x);
Integer floor_div(const Integer& a, const Integer& b);

}  // namespace primlat
