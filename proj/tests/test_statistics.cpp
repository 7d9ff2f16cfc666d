#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primlat/pipeline.hpp"
#include "primlat/statistics.hpp"

#include <cmath>

using namespace primlat;

TEST_CASE("special functions") {
  CHECK(riemann_zeta(2) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-12));
  CHECK(riemann_zeta(4) == doctest::Approx(std::pow(M_PI, 4) / 90).epsilon(1e-12));
  CHECK(riemann_zeta(3) == doctest::Approx(1.2020569031595942).epsilon(1e-12));
  CHECK(sphere_area(1) == doctest::Approx(2 * M_PI));
  CHECK(sphere_area(2) == doctest::Approx(4 * M_PI));
  CHECK(ball_volume(3) == doctest::Approx(4 * M_PI / 3));
  CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(ks_critical(0.05, 10000) == doctest::Approx(0.013581).epsilon(1e-3));
  CHECK(chi_square_sf(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(chi_square_sf(23.2093, 10) == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("empirical cdf and KS distance") {
  const EmpiricalCDF F({0.1, 0.4, 0.4, 0.9}, {1, 1, 2, 0});
  CHECK(F(0.05) == 0);
  CHECK(F(0.1) == doctest::Approx(0.25));
  CHECK(F(0.4) == doctest::Approx(1));
  CHECK(F.total_weight() == 4);
  const EmpiricalCDF G({0.25, 0.5, 0.75});
  CHECK(ks_statistic(G, [](double x) { return x; }) == doctest::Approx(0.25));
  CHECK(G.quantile(0.5) == 0.5);
  CHECK_THROWS_AS(EmpiricalCDF({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("caps") {
  CHECK(cap_fraction(3, M_PI / 2) == doctest::Approx(0.5));
  CHECK(cap_fraction(2, M_PI / 2) == doctest::Approx(0.5));
  CHECK(cap_fraction(3, M_PI / 3) == doctest::Approx(0.25));
  for (std::size_t n = 2; n <= 5; ++n) {
    const Cap c = random_cap(n, 0.1, 1, n);
    CHECK(c.measure_fraction() == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(c.contains(c.axis));
  }
}

TEST_CASE("main term at alpha = 1 is the primitive count asymptotic") {
  for (std::size_t n = 2; n <= 5; ++n) {
    const double T = 3.0;
    const double expected = ball_volume(n) * std::exp(static_cast<double>(n) * T) / riemann_zeta(static_cast<double>(n));
    CHECK(joint_main_term(n, T, 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(CountingConstants::for_dimension(n).primitive_density() ==
          doctest::Approx(ball_volume(n) / riemann_zeta(static_cast<double>(n))));
  }
}

TEST_CASE("joint counts on a complete enumeration") {
  const double R = 60;
  const auto records = observe_orbits(3, R, 1);
  JointQuery q;
  q.T = std::log(R);
  NuOptions o;
  o.mc_samples = 1000;
  const JointCountResult all = joint_count(records, R, q, o);
  CHECK(all.count == static_cast<double>(count_primitive(3, R)));
  CHECK(std::abs(all.relative_error) < 0.03);
  q.alpha = 0;
  CHECK(joint_count(records, R, q, o).count == 6);  // units have w_perp = 0
  q.T = std::log(2 * R);
  CHECK_THROWS_AS(joint_count(records, R, q, o), std::invalid_argument);
}

TEST_CASE("direction counts") {
  DirectionCounter c(cap_with_fraction({1, 0, 0}, 0.5));
  const std::int64_t a[3] = {2, 1, 0}, b[3] = {-1, 0, 0};
  c.add(a);
  c.add(b, 3);
  const DirectionResult r = c.result();
  CHECK(r.observed == doctest::Approx(0.25));
  CHECK(r.expected == doctest::Approx(0.5));
}

TEST_CASE("shell scan and cusp counts") {
  const auto records = observe_orbits(3, 40, 1);
  const std::vector<double> eps = {0.05}, edges = {5, 10, 20, 40};
  const auto rows = shell_scan(records, eps, edges);
  REQUIRE(rows.size() == 3);
  double total = 0;
  for (const auto& r : rows) total += r.weight;
  CHECK(total > 0);
  const std::vector<double> sigma = {0.5};
  CHECK(cusp_count(records, std::log(40.0), sigma) > 0);
  CHECK(cusp_count(records, std::log(40.0), sigma) >= cusp_count(records, std::log(20.0), sigma));
  CHECK_THROWS_AS(shell_scan(observe_orbits(2, 10, 1), eps, edges), std::invalid_argument);
}

TEST_CASE("sublattice counts by brute force") {
  const std::vector<CovolWindow> none;
  // Rank-1 sublattices of Z^2 of covolume <= X: k times a primitive vector up
  // to sign, |v| <= X / k.
  std::uint64_t expected = 0;
  for (int k = 1; k <= 10; ++k) expected += count_primitive(2, 10.0 / k) / 2;
  CHECK(sublattice_count_oracle(2, 10, none) == expected);
  const std::vector<CovolWindow> tight = {{0, 1.5}};
  CHECK(sublattice_count_oracle(2, 10, tight) == 4);  // e1, e2, (1, 1), (1, -1)
  CHECK_THROWS_AS(sublattice_count_oracle(4, 5, none), std::invalid_argument);
}
