#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primlat/exact_core.hpp"
#include "primlat/random.hpp"

using namespace primlat;

TEST_CASE("orthogonal lattice of (2, 3)") {
  const IntLattice L = orthogonal_lattice(make_intvec({2, 3}));
  REQUIRE(L.rank() == 1);
  CHECK(L.column(0) == make_intvec({3, -2}));
  CHECK(gram_det(L) == 13);
}

TEST_CASE("orthogonal lattice is oriented and has covolume |v|") {
  CounterRng rng(derive_stream({7}));
  int checked = 0;
  while (checked < 200) {
    const std::size_t n = 2 + rng.below(4);
    IntVec v(n);
    for (auto& e : v) e = static_cast<long>(rng.below(41)) - 20;
    if (norm_sq(v) == 0 || !is_primitive(v)) continue;
    const IntLattice L = orthogonal_lattice(v);
    REQUIRE(L.rank() == n - 1);
    for (std::size_t j = 0; j < L.rank(); ++j) CHECK(dot(L.column(j), v) == 0);
    CHECK(gram_det(L) == norm_sq(v));
    CHECK(determinant(L.basis().with_column(v)) == norm_sq(v));
    ++checked;
  }
}

TEST_CASE("primitivity and the particular solution") {
  CHECK(is_primitive(make_intvec({2, 3})));
  CHECK_FALSE(is_primitive(make_intvec({4, 6, 8})));
  CHECK_THROWS_AS(is_primitive(make_intvec({0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(particular_solution(make_intvec({2, 4})), std::domain_error);
  CHECK_THROWS_AS(orthogonal_lattice(make_intvec({3, 6, 9})), std::domain_error);
  for (const auto& v : {make_intvec({2, 3}), make_intvec({6, 10, 15}), make_intvec({-7, 0, 4, 9}),
                        make_intvec({1000003, 999983, 0, 0, 5})})
    CHECK(dot(v, particular_solution(v)) == 1);
}

TEST_CASE("determinant and hermite normal form") {
  const IntMatrix m{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
  CHECK(determinant(m) == 18);
  CHECK(determinant(IntMatrix{{1, 2}, {2, 4}}) == 0);

  const IntMatrix a{{4, 6}, {2, 8}};
  const HnfResult r = hnf_with_transform(a);
  CHECK(r.rank == 2);
  CHECK(a * r.transform == r.h);
  CHECK(abs(determinant(r.transform)) == 1);
  CHECK(abs(determinant(r.h)) == abs(determinant(a)));
  CHECK(r.h(0, 1) == 0);
}

TEST_CASE("rounding halves up") {
  CHECK(round_nearest(Rational(1, 2)) == 1);
  CHECK(round_nearest(Rational(-1, 2)) == 0);
  CHECK(round_nearest(Rational(-3, 2)) == -1);
  CHECK(round_nearest(Rational(7, 3)) == 2);
  CHECK(floor_div(Integer(-7), Integer(2)) == -4);
}

TEST_CASE("lattice coordinates") {
  const IntLattice L(IntMatrix{{1, 1}, {0, 2}});
  const auto y = L.coordinates(to_rational(make_intvec({3, 4})));
  REQUIRE(y);
  CHECK((*y)[0] == 1);
  CHECK((*y)[1] == 2);
  CHECK_THROWS_AS(IntLattice(IntMatrix{{1, 2}, {2, 4}}), std::invalid_argument);
}
