#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primlat/kernels.hpp"

#include <cstring>

using namespace primlat;

namespace {

void check_same(const Observation& a, const Observation& b, double tol) {
  const std::size_t n = a.n;
  REQUIRE(a.n == b.n);
  CHECK(a.flags == b.flags);
  CHECK(a.norm_sq == b.norm_sq);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(a.v[i] == b.v[i]);
    CHECK(a.w[i] == b.w[i]);
  }
  CHECK(a.norm_v == doctest::Approx(b.norm_v).epsilon(tol));
  CHECK(a.norm_w == doctest::Approx(b.norm_w).epsilon(tol));
  CHECK(a.rho == doctest::Approx(b.rho).epsilon(tol));
  CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(tol));
  CHECK(a.ratio_perp == doctest::Approx(b.ratio_perp).epsilon(tol));
  for (std::size_t i = 0; i + 2 < n; ++i) CHECK(a.s[i] == doctest::Approx(b.s[i]).epsilon(tol).scale(1));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    CHECK(a.x[i] == doctest::Approx(b.x[i]).epsilon(tol).scale(1));
    CHECK(a.a[i] == doctest::Approx(b.a[i]).epsilon(tol));
  }
  for (std::size_t i = 0; i < 6; ++i) CHECK(a.nij[i] == doctest::Approx(b.nij[i]).epsilon(tol).scale(1));
}

bool bitwise_equal(const std::vector<Observation>& a, const std::vector<Observation>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Observation &x = a[i], &y = b[i];
    if (x.n != y.n || x.flags != y.flags || x.weight != y.weight || x.norm_sq != y.norm_sq) return false;
    if (std::memcmp(x.v, y.v, sizeof x.v) || std::memcmp(x.w, y.w, sizeof x.w)) return false;
    const double xs[] = {x.norm_v, x.norm_w, x.rho, x.ratio, x.ratio_perp, x.ratio_naive};
    const double ys[] = {y.norm_v, y.norm_w, y.rho, y.ratio, y.ratio_perp, y.ratio_naive};
    if (std::memcmp(xs, ys, sizeof xs) || std::memcmp(x.s, y.s, sizeof x.s) || std::memcmp(x.x, y.x, sizeof x.x) ||
        std::memcmp(x.a, y.a, sizeof x.a) || std::memcmp(x.nij, y.nij, sizeof x.nij))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("fast paths agree with the exact pipeline") {
  for (std::size_t n : {2, 3}) {
    std::size_t compared = 0;
    enumerate_primitive(n, n == 2 ? 60.0 : 11.0, EnumerationMode::full, [&](const PrimitiveBlock& b) {
      for (std::size_t i = 0; i < b.size(); ++i) {
        std::span<const std::int64_t> v(b.vec(i), n);
        REQUIRE(fast_path_supported(v));
        check_same(observe_fast(v), observe_exact(v), 1e-9);
        ++compared;
      }
    });
    CHECK(compared > 1000);
  }
  const std::vector<std::int64_t> big = {7001, 6000, 3};
  REQUIRE(fast_path_supported(big));
  check_same(observe_fast(big), observe_exact(big), 1e-9);
  CHECK_FALSE(fast_path_supported(std::vector<std::int64_t>{20000, 1, 1}));
  CHECK_FALSE(fast_path_supported(std::vector<std::int64_t>{1, 2, 3, 4}));
}

TEST_CASE("serial and parallel kernels give identical output") {
  for (const auto& [n, R] : std::vector<std::pair<std::size_t, double>>{{2, 80}, {3, 14}, {4, 6}}) {
    for (auto mode : {EnumerationMode::full, EnumerationMode::orbits}) {
      std::vector<Observation> serial, p1, p3, samples1, samples3;
      enumerate_primitive(n, R, mode, [&](const PrimitiveBlock& b) {
        observe_block_serial(b, serial);
        observe_block_parallel(b, p1, 1);
        observe_block_parallel(b, p3, 3);
        if (mode == EnumerationMode::orbits) {
          observe_orbit_samples(b, 4, samples1, 1);
          observe_orbit_samples(b, 4, samples3, 3);
        }
      });
      CHECK(!serial.empty());
      CHECK(bitwise_equal(serial, p1));
      CHECK(bitwise_equal(serial, p3));
      CHECK(bitwise_equal(samples1, samples3));
    }
  }
}

TEST_CASE("orbit samples are orbit members with unit weight") {
  std::vector<Observation> reps, samples;
  enumerate_primitive(3, 12, EnumerationMode::orbits, [&](const PrimitiveBlock& b) {
    observe_block_serial(b, reps);
    observe_orbit_samples(b, 2, samples, 1);
  });
  CHECK(samples.size() < reps.size());
  for (const auto& o : samples) {
    CHECK(o.weight == 1);
    CHECK(is_orbit_sample({o.v, 3}, 2));
  }
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
