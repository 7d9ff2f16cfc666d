#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primlat/gcd_equation.hpp"
#include "primlat/oracle.hpp"
#include "primlat/reduction.hpp"

#include <cmath>

using namespace primlat;

TEST_CASE("reduced bases satisfy the fundamental domain inequalities") {
  for (std::uint64_t i = 0; i < 300; ++i) {
    const std::size_t k = 2 + i % 3;
    const IntMatrix b = random_basis(k, 12, 3, i);
    const ReducedBasis r = siegel_reduce(IntLattice(b));
    CHECK(determinant(r.transform) == 1);
    CHECK(b * r.transform == r.lattice.basis());
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < j; ++l) CHECK(abs(r.exact.mu[l][j]) <= Rational(1, 2));
      if (j + 1 < k) CHECK(4 * r.exact.d[j + 1] >= 3 * r.exact.d[j]);
      CHECK(r.gsd.a[j] == doctest::Approx(std::sqrt(r.exact.d[j].get_d())));
    }
  }
}

TEST_CASE("rank above four is rejected") {
  CHECK_THROWS_AS(siegel_reduce(IntLattice(IntMatrix::identity(5))), std::invalid_argument);
}

TEST_CASE("shape matrices are unimodular and upper triangular") {
  const IntLattice L(IntMatrix{{3, 1, 0}, {0, 2, 1}, {1, 0, 5}});
  const RealMatrix z = shape(L);
  double det = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    det *= z[i][i];
    for (std::size_t j = 0; j < i; ++j) CHECK(z[i][j] == 0);
  }
  CHECK(det == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("refined coordinates reconstruct [reduced basis | w]") {
  for (const auto& v : {make_intvec({3, 5, 7}), make_intvec({1, 2, 2}), make_intvec({11, -4, 6, 9}),
                        make_intvec({2, 3, 5, 7, 11})}) {
    const IntVec w = shortest_solution(v);
    const RICoords ri = refined_iwasawa(v, w);
    const RealMatrix m = reconstruct(ri);
    const std::size_t n = v.size();
    const IntMatrix target = ri.reduced.lattice.basis().with_column(w);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) CHECK(m[r][c] == doctest::Approx(target(r, c).get_d()).epsilon(1e-9));
    CHECK(ri.t == doctest::Approx(0.5 * std::log(norm_sq(v).get_d())));
  }
  CHECK_THROWS_AS(refined_iwasawa(make_intvec({2, 3}), make_intvec({1, 1})), std::domain_error);
}

TEST_CASE("iota") {
  CHECK(iota(1) == 1);
  CHECK(iota(2) == 2);
  CHECK(iota(3) == 1);
  CHECK(iota(4) == 2);
}
