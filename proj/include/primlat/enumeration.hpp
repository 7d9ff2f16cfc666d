#pragma once

// Short-vector and close-vector enumeration on an integer Gram matrix.
// Traversal is guided by binary64 Gram-Schmidt data with a small slack; every
// reported vector is re-checked in exact arithmetic.

#include "primlat/exact_core.hpp"

#include <functional>

namespace primlat {

// Unimodular U such that U^T G U is LLL-reduced (delta = 99/100).
IntMatrix lll_transform(const IntMatrix& gram);

// Exact inverse of a unimodular integer matrix. Throws std::domain_error if
// the determinant is not +-1.
IntMatrix unimodular_inverse(const IntMatrix& u);

// Smallest positive integer D with D * q integral for every entry, and the
// scaled integer matrix.
IntMatrix clear_denominators(const std::vector<RationalVec>& q, Integer* scale = nullptr);

// Exact value of (y - c)^T G (y - c).
Rational quadratic_form(const IntMatrix& gram, const IntVec& y, const RationalVec& center);
Integer quadratic_form(const IntMatrix& gram, const IntVec& y);

// Calls visit(y) for every integer y with (y - c)^T G (y - c) <= bound.
// The form must be positive definite. Throws std::length_error when more than
// max_points vectors qualify.
void enumerate_within(const IntMatrix& gram, const RationalVec& center, const Rational& bound,
                      const std::function<void(const IntVec&)>& visit,
                      std::size_t max_points = 50'000'000);

// All nonzero y attaining the minimum of y^T G y, sorted lexicographically.
std::vector<IntVec> minimal_vectors(const IntMatrix& gram, Rational* minimum = nullptr);

// All integer y minimizing (y - c)^T G (y - c), sorted lexicographically.
std::vector<IntVec> closest_points(const IntMatrix& gram, const RationalVec& center,
                                   Rational* minimum = nullptr);

bool lex_less(const IntVec& a, const IntVec& b);

}  // namespace primlat
