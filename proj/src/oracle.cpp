#include "primlat/oracle.hpp"

#include "primlat/measure.hpp"
#include "primlat/random.hpp"
#include "primlat/reduction.hpp"
#include "primlat/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace primlat {

namespace {

using i128 = __int128;

struct Adjugate {
  std::vector<std::vector<long>> adj;  // adj * basis = det * I
  long det = 0;
};

IntMatrix minor_of(const IntMatrix& m, std::size_t r, std::size_t c) {
  IntMatrix out(m.rows() - 1, m.cols() - 1);
  for (std::size_t i = 0, ii = 0; i < m.rows(); ++i) {
    if (i == r) continue;
    for (std::size_t j = 0, jj = 0; j < m.cols(); ++j) {
      if (j == c) continue;
      out(ii, jj++) = m(i, j);
    }
    ++ii;
  }
  return out;
}

Adjugate adjugate_small(const std::vector<std::vector<long>>& m) {
  Adjugate a;
  const std::size_t k = m.size();
  if (k == 1) {
    a.adj = {{1}};
    a.det = m[0][0];
  } else if (k == 2) {
    a.adj = {{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}};
    a.det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  } else {
    a.adj.assign(3, std::vector<long>(3));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        // cofactor of entry (j, i)
        const std::size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        a.adj[i][j] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
      }
    a.det = m[0][0] * a.adj[0][0] + m[0][1] * a.adj[1][0] + m[0][2] * a.adj[2][0];
  }
  return a;
}

Adjugate adjugate(const IntMatrix& b) {
  const std::size_t k = b.rows();
  if (k <= 3) {
    std::vector<std::vector<long>> m(k, std::vector<long>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[i][j] = b(i, j).get_si();
    return adjugate_small(m);
  }
  Adjugate a;
  a.det = determinant(b).get_si();
  a.adj.assign(k, std::vector<long>(k, 1));
  if (k == 1) return a;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const long m = determinant(minor_of(b, j, i)).get_si();
      a.adj[i][j] = ((i + j) % 2 == 0) ? m : -m;
    }
  return a;
}

bool member(const Adjugate& a, const std::vector<long>& x, std::vector<long>* coeffs) {
  const std::size_t k = x.size();
  for (std::size_t i = 0; i < k; ++i) {
    i128 s = 0;
    for (std::size_t j = 0; j < k; ++j) s += static_cast<i128>(a.adj[i][j]) * x[j];
    if (s % a.det != 0) return false;
    if (coeffs) (*coeffs)[i] = static_cast<long>(s / a.det);
  }
  return true;
}

// Every integer x with |den x - num|^2 <= limit.
void ball_points(const std::vector<long>& num, long den, long limit,
                 const std::function<void(const std::vector<long>&)>& visit) {
  const std::size_t k = num.size();
  std::vector<long> x(k);
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long used) {
    if (i == k) {
      visit(x);
      return;
    }
    const long rem = limit - used;
    const double r = std::sqrt(static_cast<double>(rem));
    const long lo = static_cast<long>(std::floor((static_cast<double>(num[i]) - r) / static_cast<double>(den))) - 1;
    const long hi = static_cast<long>(std::ceil((static_cast<double>(num[i]) + r) / static_cast<double>(den))) + 1;
    for (long t = lo; t <= hi; ++t) {
      const long d = den * t - num[i];
      if (d * d > rem) continue;
      x[i] = t;
      rec(i + 1, used + d * d);
    }
  };
  rec(0, 0);
}

std::vector<long> to_longs(const IntVec& v) {
  std::vector<long> out;
  for (const auto& e : v) out.push_back(e.get_si());
  return out;
}

IntVec from_longs(const std::vector<long>& v) {
  IntVec out;
  for (long e : v) out.emplace_back(e);
  return out;
}

// Smallest sum of squared Gram-Schmidt lengths over column orders, rounded
// up. A quarter of it bounds rho^2 (nearest plane rounding).
long gram_schmidt_bound(const IntMatrix& b) {
  const std::size_t k = b.cols();
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  Rational best = -1;
  do {
    std::vector<RationalVec> star;
    Rational sum = 0;
    for (std::size_t j : order) {
      RationalVec u(b.rows());
      for (std::size_t r = 0; r < b.rows(); ++r) u[r] = b(r, j);
      for (const auto& s : star) {
        Rational num = 0, den = 0;
        for (std::size_t r = 0; r < u.size(); ++r) {
          num += Rational(b(r, j)) * s[r];
          den += s[r] * s[r];
        }
        const Rational mu = num / den;
        for (std::size_t r = 0; r < u.size(); ++r) u[r] -= mu * s[r];
      }
      for (const auto& e : u) sum += e * e;
      star.push_back(std::move(u));
    }
    if (best < 0 || sum < best) best = sum;
  } while (std::next_permutation(order.begin(), order.end()));
  Integer up;
  mpz_cdiv_q(up.get_mpz_t(), best.get_num_mpz_t(), best.get_den_mpz_t());
  return up.get_si();
}

// Lattice points with |x|^2 <= the bound above (four times a bound on
// rho^2), which contains every relevant vector.
std::optional<std::vector<std::vector<long>>> relevant_search_set(const IntMatrix& basis, std::size_t max_points) {
  const Adjugate a = adjugate(basis);
  const std::size_t k = basis.rows();
  std::vector<std::vector<long>> pts;
  bool overflow = false;
  ball_points(std::vector<long>(k, 0), 1, gram_schmidt_bound(basis), [&](const std::vector<long>& x) {
    if (overflow) return;
    if (std::all_of(x.begin(), x.end(), [](long e) { return e == 0; })) return;
    if (!member(a, x, nullptr)) return;
    pts.push_back(x);
    if (pts.size() > max_points) overflow = true;
  });
  if (overflow) return std::nullopt;
  return pts;
}

std::string describe(const IntMatrix& b) {
  std::ostringstream os;
  os << "basis";
  for (std::size_t j = 0; j < b.cols(); ++j) os << ' ' << to_string(b.column(j));
  return os.str();
}

}  // namespace

IntMatrix random_basis(std::size_t k, long bound, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(derive_stream({seed, index, k}));
  while (true) {
    IntMatrix b(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        b(i, j) = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * bound + 1))) - bound;
    if (determinant(b) != 0) return b;
  }
}

std::vector<IntVec> brute_lattice_points(const IntMatrix& basis, const IntVec& center_num, long center_den,
                                         const Rational& bound) {
  const Adjugate a = adjugate(basis);
  const Rational scaled = bound * center_den * center_den;
  const long limit = mpz_class(scaled.get_num() / scaled.get_den()).get_si();
  std::vector<IntVec> out;
  ball_points(to_longs(center_num), center_den, limit, [&](const std::vector<long>& x) {
    if (member(a, x, nullptr)) out.push_back(from_longs(x));
  });
  return out;
}

BruteShortest brute_shortest(const IntMatrix& basis) {
  Integer bound = norm_sq(basis.column(0));
  for (std::size_t j = 1; j < basis.cols(); ++j) bound = std::min(bound, norm_sq(basis.column(j)));
  BruteShortest r;
  r.norm_sq = bound;
  for (auto& x : brute_lattice_points(basis, IntVec(basis.rows(), Integer(0)), 1, Rational(bound))) {
    const Integer q = norm_sq(x);
    if (q == 0) continue;
    if (q < r.norm_sq) {
      r.norm_sq = q;
      r.vectors.clear();
    }
    if (q == r.norm_sq) r.vectors.push_back(std::move(x));
  }
  std::sort(r.vectors.begin(), r.vectors.end());
  return r;
}

BruteClosest brute_closest(const IntMatrix& basis, const IntVec& target_num, long target_den) {
  const Adjugate a = adjugate(basis);
  const Rational bound(gram_schmidt_bound(basis), 4);
  BruteClosest r;
  bool first = true;
  std::vector<long> coeffs(basis.rows());
  for (const auto& x : brute_lattice_points(basis, target_num, target_den, bound)) {
    Rational d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      Rational t(target_num[i], target_den);
      t.canonicalize();
      const Rational e = x[i] - t;
      d += e * e;
    }
    member(a, to_longs(x), &coeffs);
    if (first || d < r.dist_sq) {
      r.dist_sq = d;
      r.coefficients.clear();
      first = false;
    }
    if (d == r.dist_sq) r.coefficients.push_back(from_longs(coeffs));
  }
  std::sort(r.coefficients.begin(), r.coefficients.end());
  return r;
}

std::optional<Rational> brute_covering_radius_sq(const IntMatrix& basis, std::size_t max_points) {
  const std::size_t k = basis.rows();
  if (k < 1 || k > 3) throw std::invalid_argument("brute covering radius supports rank 1 to 3");
  const auto set = relevant_search_set(basis, max_points);
  if (!set) return std::nullopt;
  const auto& pts = *set;
  const long ub4 = gram_schmidt_bound(basis);  // 4 * upper bound on rho^2

  // Circumcenter of {0, p_1..p_k}: c = N / D with P^T c = h / 2.
  Rational best = 0;
  std::vector<std::size_t> pick(k);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t depth, std::size_t from) {
    if (depth < k) {
      for (std::size_t i = from; i < pts.size(); ++i) {
        pick[depth] = i;
        choose(depth + 1, i + 1);
      }
      return;
    }
    std::vector<std::vector<long>> pt(k);
    for (std::size_t r = 0; r < k; ++r) pt[r] = pts[pick[r]];
    const Adjugate a = adjugate_small(pt);
    if (a.det == 0) return;
    std::vector<i128> N(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        i128 h = 0;
        for (long e : pts[pick[j]]) h += static_cast<i128>(e) * e;
        N[i] += static_cast<i128>(a.adj[i][j]) * h;
      }
    i128 D = 2 * static_cast<i128>(a.det);
    if (D < 0) {
      D = -D;
      for (auto& e : N) e = -e;
    }
    i128 nn = 0;
    for (auto e : N) nn += e * e;
    if (4 * nn > static_cast<i128>(ub4) * D * D) return;  // |c|^2 above the upper bound on rho^2
    for (const auto& x : pts) {
      i128 xx = 0, xn = 0;
      for (std::size_t i = 0; i < k; ++i) {
        xx += static_cast<i128>(x[i]) * x[i];
        xn += static_cast<i128>(x[i]) * N[i];
      }
      if (xx * D < 2 * xn) return;  // strictly inside the circumsphere
    }
    const auto to_mpz = [](i128 v) {
      const bool neg = v < 0;
      unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
      Integer z = static_cast<unsigned long>(u >> 64);
      z <<= 64;
      z += static_cast<unsigned long>(u & 0xffffffffffffffffULL);
      return neg ? Integer(-z) : z;
    };
    Rational c(to_mpz(nn), to_mpz(D * D));
    c.canonicalize();
    best = std::max(best, c);
  };
  choose(0, 0);
  return best;
}

std::optional<double> brute_l_alpha_rank2(const IntMatrix& basis, double alpha, std::size_t steps) {
  if (basis.rows() != 2) throw std::invalid_argument("rank 2 only");
  const auto set = relevant_search_set(basis, 200);
  const auto rho_sq = brute_covering_radius_sq(basis, 200);
  if (!set || !rho_sq) return std::nullopt;
  const double r = alpha * std::sqrt(rho_sq->get_d());
  const double det = std::abs(determinant(basis).get_d());
  double area = 0;
  const double h = 2 * M_PI / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const double th = (static_cast<double>(s) + 0.5) * h;
    const double ux = std::cos(th), uy = std::sin(th);
    double reach = INFINITY;
    for (const auto& p : *set) {
      const double px = static_cast<double>(p[0]), py = static_cast<double>(p[1]);
      const double d = ux * px + uy * py;
      if (d > 0) reach = std::min(reach, (px * px + py * py) / (2 * d));
    }
    const double m = std::min(reach, r);
    area += 0.5 * m * m * h;
  }
  return area / det;
}

// ---------------------------------------------------------------------------

SuiteResult run_oracle_suite(const std::string& suite, std::uint64_t seed, std::size_t instances) {
  if (std::find(kOracleSuites.begin(), kOracleSuites.end(), suite) == kOracleSuites.end())
    throw std::invalid_argument("unknown suite");
  SuiteResult res;
  res.suite = suite;
  auto fail = [&](const std::string& msg) {
    if (res.failures.size() < 10) res.failures.push_back(msg);
  };
  const auto suite_index = static_cast<std::uint64_t>(
      std::find(kOracleSuites.begin(), kOracleSuites.end(), suite) - kOracleSuites.begin());
  CounterRng rng(derive_stream({seed, suite_index}));

  if (suite == "covering") {
    const IntLattice a2 = orthogonal_lattice(make_intvec({1, 1, 1}));
    const std::vector<std::pair<std::string, std::pair<Rational, Rational>>> fixtures = {
        {"Z^2", {covering_radius(IntLattice(IntMatrix::identity(2))), Rational(1, 2)}},
        {"Z^3", {covering_radius(IntLattice(IntMatrix::identity(3))), Rational(3, 4)}},
        {"hexagonal", {covering_radius(a2) / Rational(2), Rational(1, 3)}},
    };
    for (const auto& [name, vals] : fixtures) {
      ++res.instances;
      if (vals.first == vals.second) {
        ++res.passed;
      } else {
        fail(name + ": rho^2 = " + vals.first.get_str() + ", expected " + vals.second.get_str());
      }
    }
  }

  std::uint64_t index = 0;
  std::size_t attempts = 0;
  while (res.instances < instances + (suite == "covering" ? 3 : 0)) {
    if (++attempts > 50 * instances) break;
    const std::size_t k = suite == "reduction" ? 2 + index % 3 : 2 + index % 2;
    const IntMatrix basis = random_basis(k, 10, seed, index++);
    const IntLattice lattice(basis);

    if (suite == "cvp") {
      ++res.instances;
      bool ok = true;
      const BruteShortest bs = brute_shortest(basis);
      const IntVec sv = shortest_vector(lattice);
      if (norm_sq(sv) != bs.norm_sq || sv != bs.vectors.front()) {
        ok = false;
        fail("SVP " + describe(basis) + ": got " + to_string(sv) + ", brute force " + to_string(bs.vectors.front()));
      }
      const long den = 1 + static_cast<long>(rng.below(6));
      IntVec num(k);
      for (auto& e : num) e = static_cast<long>(rng.below(static_cast<std::uint64_t>(20 * den + 1))) - 10 * den;
      RationalVec target(k);
      for (std::size_t i = 0; i < k; ++i) {
        target[i] = Rational(num[i], den);
        target[i].canonicalize();
      }
      const BruteClosest bc = brute_closest(basis, num, den);
      const IntVec cv = closest_vector(lattice, target);
      if (bc.coefficients.empty() || cv != bc.coefficients.front()) {
        ok = false;
        fail("CVP " + describe(basis) + " target " + to_string(num) + "/" + std::to_string(den) + ": got " +
             to_string(cv) + ", brute force " + (bc.coefficients.empty() ? "none" : to_string(bc.coefficients.front())));
      }
      if (ok) ++res.passed;
    } else if (suite == "covering") {
      const auto brute = brute_covering_radius_sq(basis, k == 2 ? 120 : 70);
      if (!brute) {
        ++res.skipped;
        continue;
      }
      ++res.instances;
      const Rational got = covering_radius(lattice);
      if (got == *brute) {
        ++res.passed;
      } else {
        fail(describe(basis) + ": rho^2 = " + got.get_str() + ", brute force " + brute->get_str());
      }
    } else if (suite == "reduction") {
      ++res.instances;
      const ReducedBasis red = siegel_reduce(lattice);
      std::string why;
      const auto& d = red.exact.d;
      for (std::size_t j = 0; j < k && why.empty(); ++j) {
        for (std::size_t i = 0; i < j; ++i)
          if (abs(red.exact.mu[i][j]) > Rational(1, 2)) why = "|n_ij| > 1/2";
        if (j + 1 < k && 4 * d[j + 1] < 3 * d[j]) why = "a_{j+1} < (sqrt 3 / 2) a_j";
      }
      if (why.empty() && determinant(red.transform) != 1) why = "transform is not in SL(k, Z)";
      if (why.empty() && !(basis * red.transform == red.lattice.basis())) why = "basis does not match transform";
      if (why.empty() && k <= 3 && norm_sq(red.lattice.column(0)) != brute_shortest(basis).norm_sq)
        why = "first vector is not a shortest vector";
      if (why.empty()) {
        ++res.passed;
      } else {
        fail(describe(basis) + ": " + why);
      }
    } else {  // lalpha
      if (k != 2) continue;
      const double alpha = rng.uniform();
      const auto brute = brute_l_alpha_rank2(basis, alpha);
      if (!brute) {
        ++res.skipped;
        continue;
      }
      ++res.instances;
      const double got = l_alpha(lattice, alpha, seed).value;
      if (std::abs(got - *brute) <= 1e-5) {
        ++res.passed;
      } else {
        std::ostringstream os;
        os << describe(basis) << " alpha " << alpha << ": L = " << got << ", quadrature " << *brute;
        fail(os.str());
      }
    }
  }
  return res;
}

}  // namespace primlat
