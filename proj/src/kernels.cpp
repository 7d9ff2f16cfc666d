#include "primlat/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace primlat {

namespace {

using i128 = __int128;
using Vec3 = std::array<std::int64_t, 3>;

struct Egcd {
  std::int64_t g, s, t;  // s a + t b = g >= 0
};

Egcd egcd(std::int64_t a, std::int64_t b) {
  std::int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::int64_t tmp = r0 - q * r1;
    r0 = r1;
    r1 = tmp;
    tmp = s0 - q * s1;
    s0 = s1;
    s1 = tmp;
    tmp = t0 - q * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 < 0) return {-r0, -s0, -t0};
  return {r0, s0, t0};
}

// floor(p / q) for q > 0
i128 floor_div(i128 p, i128 q) {
  i128 d = p / q;
  if ((p % q != 0) && (p < 0)) --d;
  return d;
}

// floor(p / q + 1/2) for q > 0
i128 round_div(i128 p, i128 q) { return floor_div(2 * p + q, 2 * q); }

i128 dot3(const Vec3& a, const Vec3& b) {
  return static_cast<i128>(a[0]) * b[0] + static_cast<i128>(a[1]) * b[1] + static_cast<i128>(a[2]) * b[2];
}

Vec3 axpy(const Vec3& x, std::int64_t k, const Vec3& y) {  // x + k y
  return {x[0] + k * y[0], x[1] + k * y[1], x[2] + k * y[2]};
}

Vec3 neg(const Vec3& x) { return {-x[0], -x[1], -x[2]}; }

i128 det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return static_cast<i128>(a[0]) * (static_cast<i128>(b[1]) * c[2] - static_cast<i128>(b[2]) * c[1]) -
         static_cast<i128>(a[1]) * (static_cast<i128>(b[0]) * c[2] - static_cast<i128>(b[2]) * c[0]) +
         static_cast<i128>(a[2]) * (static_cast<i128>(b[0]) * c[1] - static_cast<i128>(b[1]) * c[0]);
}

double ratio_of(i128 p, i128 q) { return static_cast<double>(static_cast<long double>(p) / static_cast<long double>(q)); }

void fill_common(Observation& o, std::int64_t vv, i128 ww, i128 rho_num, i128 rho_den) {
  o.norm_sq = vv;
  o.norm_v = std::sqrt(static_cast<double>(vv));
  o.norm_w = std::sqrt(static_cast<double>(ww));
  o.rho = std::sqrt(ratio_of(rho_num, rho_den));
  // ratio^2 = |w|^2 / rho^2 and ratio_perp^2 = (|w|^2 - 1/|v|^2) / rho^2
  o.ratio = std::sqrt(ratio_of(ww * rho_den, rho_num));
  o.ratio_perp = std::sqrt(ratio_of((ww * vv - 1) * rho_den, rho_num * vv));
  o.ratio_naive = std::sqrt(ratio_of(ww, vv));
  if (vv == 1) o.flags |= kUnitVector;
}

Observation observe2(std::int64_t a, std::int64_t b) {
  Observation o;
  o.n = 2;
  o.v[0] = a;
  o.v[1] = b;
  const std::int64_t vv = a * a + b * b;
  const std::int64_t g0 = b, g1 = -a;  // oriented generator of the orthogonal lattice
  const Egcd e = egcd(a, b);
  const std::int64_t w0x = e.s, w0y = e.t;
  const i128 y = static_cast<i128>(g0) * w0x + static_cast<i128>(g1) * w0y;
  const auto k0 = static_cast<std::int64_t>(floor_div(y, vv));
  i128 best = -1;
  std::int64_t bw[2] = {0, 0};
  int ties = 0;
  for (std::int64_t k = k0 - 1; k <= k0 + 2; ++k) {
    const std::int64_t wx = w0x - k * g0, wy = w0y - k * g1;
    const i128 nn = static_cast<i128>(wx) * wx + static_cast<i128>(wy) * wy;
    if (best < 0 || nn < best) {
      best = nn;
      bw[0] = wx;
      bw[1] = wy;
      ties = 1;
    } else if (nn == best) {
      ++ties;
      if (wx < bw[0] || (wx == bw[0] && wy < bw[1])) {
        bw[0] = wx;
        bw[1] = wy;
      }
    }
  }
  o.w[0] = bw[0];
  o.w[1] = bw[1];
  if (ties > 1) o.flags |= kCvpTie;
  fill_common(o, vv, best, vv, 4);
  o.a[0] = std::sqrt(static_cast<double>(vv));
  o.x[0] = ratio_of(static_cast<i128>(g0) * bw[0] + static_cast<i128>(g1) * bw[1], vv);
  return o;
}

Observation observe3(const Vec3& v) {
  Observation o;
  o.n = 3;
  for (int i = 0; i < 3; ++i) o.v[i] = v[i];
  const std::int64_t vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];

  // Oriented basis of v^perp with u1 x u2 = v.
  Vec3 u1, u2, w0;
  if (v[0] == 0 && v[1] == 0) {
    u1 = {1, 0, 0};
    u2 = {0, v[2], 0};
    w0 = {0, 0, v[2]};
  } else {
    const Egcd e = egcd(v[0], v[1]);
    u1 = {v[1] / e.g, -v[0] / e.g, 0};
    u2 = {v[2] * e.s, v[2] * e.t, -e.g};
    const Egcd f = egcd(e.g, v[2]);
    w0 = {f.s * e.s, f.s * e.t, f.t};
  }

  // Lagrange-Gauss reduction.
  Vec3 b1 = u1, b2 = u2;
  i128 n1 = dot3(b1, b1), n2 = dot3(b2, b2);
  if (n1 > n2) {
    std::swap(b1, b2);
    std::swap(n1, n2);
  }
  while (true) {
    const auto q = static_cast<std::int64_t>(round_div(dot3(b1, b2), n1));
    if (q != 0) {
      b2 = axpy(b2, -q, b1);
      n2 = dot3(b2, b2);
    }
    if (n2 >= n1) break;
    std::swap(b1, b2);
    std::swap(n1, n2);
  }

  // First vector: lexicographically smallest shortest vector.
  std::array<Vec3, 8> cand{};
  std::size_t nc = 0;
  cand[nc++] = b1;
  cand[nc++] = neg(b1);
  if (n2 == n1) {
    cand[nc++] = b2;
    cand[nc++] = neg(b2);
  }
  const Vec3 sum = axpy(b1, 1, b2), diff = axpy(b1, -1, b2);
  if (dot3(sum, sum) == n1) {
    cand[nc++] = sum;
    cand[nc++] = neg(sum);
  }
  if (dot3(diff, diff) == n1) {
    cand[nc++] = diff;
    cand[nc++] = neg(diff);
  }
  const Vec3 p1 = *std::min_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(nc));
  const Vec3 q = (p1 == b1 || p1 == neg(b1)) ? b2 : b1;

  // Second vector: size-reduced completion, lexicographically smallest sign.
  auto size_reduce = [&](const Vec3& u) {
    return axpy(u, -static_cast<std::int64_t>(round_div(dot3(u, p1), n1)), p1);
  };
  Vec3 p2 = std::min(size_reduce(q), size_reduce(neg(q)));
  const Vec3 vvec = {v[0], v[1], v[2]};
  if (det3(p1, p2, vvec) < 0) p2 = neg(p2);

  const i128 g11 = n1, g12 = dot3(p1, p2), g22 = dot3(p2, p2);
  const i128 det = g11 * g22 - g12 * g12;  // = |v|^2
  const i128 h = g12 < 0 ? -g12 : g12;

  // Closest point of the grid w0 + lattice to the origin.
  const i128 r1 = dot3(p1, w0), r2 = dot3(p2, w0);
  const auto c2base = static_cast<std::int64_t>(floor_div(g11 * r2 - g12 * r1, det));
  i128 best = -1;
  Vec3 bw{};
  int ties = 0;
  for (std::int64_t c2 = c2base - 1; c2 <= c2base + 2; ++c2) {
    const auto c1mid = static_cast<std::int64_t>(round_div(r1 - g12 * c2, g11));
    for (std::int64_t c1 = c1mid - 1; c1 <= c1mid + 1; ++c1) {
      const Vec3 w = axpy(axpy(w0, -c1, p1), -c2, p2);
      const i128 nn = dot3(w, w);
      if (best < 0 || nn < best) {
        best = nn;
        bw = w;
        ties = 1;
      } else if (nn == best) {
        ++ties;
        bw = std::min(bw, w);
      }
    }
  }
  for (int i = 0; i < 3; ++i) o.w[i] = bw[i];
  if (ties > 1) o.flags |= kCvpTie;

  // rho^2 = circumradius^2 of the non-obtuse triangle (0, p1, +-p2).
  const i128 rho_num = g11 * g22 * (g11 + g22 - 2 * h);
  const i128 rho_den = 4 * det;
  fill_common(o, vv, best, rho_num, rho_den);

  const i128 s1 = dot3(p1, bw), s2 = dot3(p2, bw);
  o.x[0] = ratio_of(g22 * s1 - g12 * s2, det);
  o.x[1] = ratio_of(g11 * s2 - g12 * s1, det);
  o.a[0] = std::sqrt(static_cast<double>(g11));
  o.a[1] = std::sqrt(ratio_of(det, g11));
  o.nij[0] = ratio_of(g12, g11);
  o.s[0] = 2 * (0.5 * std::log(static_cast<double>(vv)) / 2 - std::log(o.a[0]));
  return o;
}

}  // namespace

bool fast_path_supported(std::span<const std::int64_t> v) {
  if (v.size() != 2 && v.size() != 3) return false;
  i128 s = 0;
  for (std::int64_t e : v) {
    if (e > kFastNormLimit || e < -kFastNormLimit) return false;
    s += static_cast<i128>(e) * e;
  }
  return s > 0 && s <= kFastNormLimit;
}

Observation observe_fast(std::span<const std::int64_t> v) {
  if (!fast_path_supported(v)) throw std::invalid_argument("vector outside the fixed-width range");
  if (v.size() == 2) return observe2(v[0], v[1]);
  return observe3({v[0], v[1], v[2]});
}

Observation to_observation(const GcdRecord& rec) {
  Observation o;
  const std::size_t n = rec.v.size();
  o.n = static_cast<std::uint8_t>(n);
  o.flags = static_cast<std::uint8_t>(rec.flags);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rec.v[i].fits_slong_p() || !rec.w[i].fits_slong_p()) throw std::overflow_error("record exceeds 64-bit range");
    o.v[i] = rec.v[i].get_si();
    o.w[i] = rec.w[i].get_si();
  }
  const Integer vv = norm_sq(rec.v);
  o.norm_sq = vv.fits_slong_p() ? vv.get_si() : -1;
  o.norm_v = rec.norm_v;
  o.norm_w = rec.norm_w;
  o.rho = rec.rho;
  o.ratio = rec.ratio;
  o.ratio_perp = rec.ratio_perp;
  o.ratio_naive = rec.ratio_naive;
  std::copy(rec.s.begin(), rec.s.end(), o.s);
  std::copy(rec.x.begin(), rec.x.end(), o.x);
  const auto& gsd = rec.reduced.gsd;
  std::copy(gsd.a.begin(), gsd.a.end(), o.a);
  for (std::size_t j = 1; j < gsd.a.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) o.nij[nij_index(i, j)] = gsd.mu[i][j];
  return o;
}

Observation observe_exact(std::span<const std::int64_t> v) { return to_observation(build_record(to_intvec(v))); }

Observation observe(std::span<const std::int64_t> v, std::uint32_t weight) {
  Observation o = fast_path_supported(v) ? observe_fast(v) : observe_exact(v);
  o.weight = weight;
  return o;
}

void observe_block_serial(const PrimitiveBlock& block, std::vector<Observation>& out) {
  const std::size_t base = out.size();
  out.resize(base + block.size());
  for (std::size_t i = 0; i < block.size(); ++i)
    out[base + i] = observe(std::span<const std::int64_t>(block.vec(i), block.n), block.weight[i]);
}

void observe_block_parallel(const PrimitiveBlock& block, std::vector<Observation>& out, int threads) {
  const std::size_t base = out.size();
  out.resize(base + block.size());
  const auto count = static_cast<std::int64_t>(block.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < count; ++i)
    out[base + i] = observe(std::span<const std::int64_t>(block.vec(i), block.n), block.weight[i]);
}

void observe_orbit_samples(const PrimitiveBlock& block, std::uint64_t seed, std::vector<Observation>& out, int threads) {
  std::vector<std::int64_t> members(block.coords.size());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < block.size(); ++i) {
    const std::span<const std::int64_t> rep(block.vec(i), block.n);
    if (on_symmetry_wall(rep)) continue;
    orbit_member(rep, seed, std::span<std::int64_t>(members.data() + i * block.n, block.n));
    keep.push_back(i);
  }
  const std::size_t base = out.size();
  out.resize(base + keep.size());
  const auto count = static_cast<std::int64_t>(keep.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t k = 0; k < count; ++k)
    out[base + k] = observe(std::span<const std::int64_t>(members.data() + keep[k] * block.n, block.n));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRIMLAT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace primlat
