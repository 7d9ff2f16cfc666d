#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primlat/gcd_equation.hpp"
#include "primlat/random.hpp"

#include <cmath>
#include <map>
#include <numeric>

using namespace primlat;

TEST_CASE("shortest solutions of small equations") {
  CHECK(shortest_solution(make_intvec({2, 3})) == make_intvec({-1, 1}));
  CHECK(shortest_solution(make_intvec({3, 5})) == make_intvec({2, -1}));
  CHECK(shortest_solution(make_intvec({1, 0})) == make_intvec({1, 0}));
  CHECK_THROWS_AS(shortest_solution(make_intvec({2, 4})), std::domain_error);
}

TEST_CASE("shortest solution matches a brute-force search") {
  for (const auto& v : {make_intvec({3, 5, 7}), make_intvec({2, 2, 3}), make_intvec({4, -9, 6}),
                        make_intvec({1, 1, 1}), make_intvec({5, 8, 0, 3})}) {
    const std::size_t n = v.size();
    Integer best = -1;
    IntVec arg;
    IntVec w(n);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == n) {
        if (dot(v, w) != 1) return;
        const Integer q = norm_sq(w);
        if (best < 0 || q < best) best = q, arg = w;  // first hit is lexicographically smallest
        return;
      }
      for (long t = -6; t <= 6; ++t) {
        w[i] = t;
        rec(i + 1);
      }
    };
    rec(0);
    CHECK(shortest_solution(v) == arg);
  }
}

TEST_CASE("records verify exactly") {
  CounterRng rng(derive_stream({21}));
  int checked = 0;
  while (checked < 300) {
    const std::size_t n = 2 + rng.below(4);
    const long bound = n == 5 ? 50 : 100000;
    IntVec v(n);
    for (auto& e : v) e = static_cast<long>(rng.below(2 * bound + 1)) - bound;
    if (norm_sq(v) == 0 || !is_primitive(v)) continue;
    const GcdRecord rec = build_record(v);
    CHECK_MESSAGE(verify_record(rec).empty(), to_string(v), ": ", verify_record(rec));
    ++checked;
  }
}

TEST_CASE("units and ties are flagged") {
  const GcdRecord e1 = build_record(make_intvec({0, 1, 0}));
  CHECK((e1.flags & kUnitVector) != 0);
  CHECK(e1.w == make_intvec({0, 1, 0}));
  const GcdRecord d = build_record(make_intvec({1, 1}));
  CHECK((d.flags & kCvpTie) != 0);
  CHECK(d.w == make_intvec({0, 1}));
  CHECK(n2_normalized_ratio(build_record(make_intvec({2, 3}))) == doctest::Approx(std::sqrt(2.0) / (std::sqrt(13.0) / 2)));
  CHECK_THROWS_AS(n2_normalized_ratio(build_record(make_intvec({2, 3, 5}))), std::invalid_argument);
}

TEST_CASE("enumeration of n = 2, R = 2.5 agrees with a gcd sieve") {
  const auto vs = enumerate_primitive(2, 2.5);
  std::size_t brute = 0;
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      if (a * a + b * b <= 6 && std::gcd(a, b) == 1) ++brute;
  CHECK(brute == 16);
  CHECK(vs.size() == brute);
  CHECK(count_primitive(2, 2.5) == 16);
  CHECK(vs.front() == make_intvec({-1, 0}));
  CHECK_THROWS_AS(enumerate_primitive(6, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_primitive(1, 3.0), std::invalid_argument);
}

TEST_CASE("orbit weights reproduce full counts") {
  for (const auto& [n, R] : std::vector<std::pair<std::size_t, double>>{{2, 40}, {3, 18}, {4, 8}, {5, 5}}) {
    std::uint64_t full = 0, weighted = 0;
    enumerate_primitive(n, R, EnumerationMode::full, [&](const PrimitiveBlock& b) { full += b.size(); });
    enumerate_primitive(n, R, EnumerationMode::orbits, [&](const PrimitiveBlock& b) {
      for (auto w : b.weight) weighted += w;
    });
    CHECK(full == weighted);
    CHECK(count_primitive(n, R) == full);
  }
}

TEST_CASE("full enumeration is ordered by norm, then lexicographically") {
  std::vector<std::int64_t> prev;
  std::int64_t prev_norm = 0;
  bool ordered = true;
  enumerate_primitive(3, 9, EnumerationMode::full, [&](const PrimitiveBlock& b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      std::vector<std::int64_t> cur(b.vec(i), b.vec(i) + 3);
      if (!prev.empty() && (b.norm_sq[i] < prev_norm || (b.norm_sq[i] == prev_norm && !(prev < cur)))) ordered = false;
      prev = cur;
      prev_norm = b.norm_sq[i];
    }
  });
  CHECK(ordered);
}

TEST_CASE("orbit samples pick one member of each generic orbit") {
  std::map<std::vector<std::int64_t>, int> picked;
  std::size_t generic_orbits = 0;
  enumerate_primitive(3, 14, EnumerationMode::orbits, [&](const PrimitiveBlock& b) {
    for (std::size_t i = 0; i < b.size(); ++i)
      if (!on_symmetry_wall({b.vec(i), 3})) ++generic_orbits;
  });
  enumerate_primitive(3, 14, EnumerationMode::full, [&](const PrimitiveBlock& b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      std::span<const std::int64_t> v(b.vec(i), 3);
      if (!is_orbit_sample(v, 9)) continue;
      std::vector<std::int64_t> key(v.begin(), v.end());
      for (auto& e : key) e = std::abs(e);
      std::sort(key.begin(), key.end());
      ++picked[key];
    }
  });
  CHECK(picked.size() == generic_orbits);
  for (const auto& [key, count] : picked) CHECK(count == 1);

  std::int64_t out[3];
  const std::int64_t rep[3] = {2, 5, 9};
  orbit_member(rep, 9, out);
  CHECK(is_orbit_sample(out, 9));
  CHECK(on_symmetry_wall(std::vector<std::int64_t>{0, 1, 2}));
  CHECK(on_symmetry_wall(std::vector<std::int64_t>{3, -3, 2}));
  CHECK_FALSE(on_symmetry_wall(std::vector<std::int64_t>{1, 2, 3}));
}

TEST_CASE("orbit sizes") {
  CHECK(orbit_size(std::vector<std::int64_t>{1, 2, 3}) == 48);
  CHECK(orbit_size(std::vector<std::int64_t>{0, 1, 2}) == 24);
  CHECK(orbit_size(std::vector<std::int64_t>{1, 1, 1}) == 8);
  CHECK(orbit_size(std::vector<std::int64_t>{0, 0, 1}) == 6);
  CHECK(orbit_size(std::vector<std::int64_t>{1, 2}) == 8);
}
