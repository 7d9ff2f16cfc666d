#include "primlat/gcd_equation.hpp"

#include "primlat/enumeration.hpp"
#include "primlat/random.hpp"
#include "primlat/voronoi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace primlat {

namespace {

std::int64_t isqrt(std::int64_t x) {
  if (x <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

void check_dimension(std::size_t n) {
  if (n < kMinDimension || n > kMaxDimension) throw std::invalid_argument("unsupported dimension");
}

class BlockBuilder {
 public:
  BlockBuilder(std::size_t n, EnumerationMode mode, std::int64_t lo, std::int64_t hi, PrimitiveBlock& out)
      : n_(n), orbits_(mode == EnumerationMode::orbits), lo_(lo), hi_(hi), out_(out) {}

  void run() { recurse(0, 0, 0); }

 private:
  void emit(std::int64_t norm) {
    out_.coords.insert(out_.coords.end(), cur_.begin(), cur_.begin() + static_cast<std::ptrdiff_t>(n_));
    out_.norm_sq.push_back(norm);
    out_.weight.push_back(orbits_ ? orbit_size(std::span<const std::int64_t>(cur_.data(), n_)) : 1u);
  }

  void recurse(std::size_t i, std::int64_t partial, std::int64_t g) {
    if (i + 1 == n_) {
      const std::int64_t b = isqrt(hi_ - partial);
      const std::int64_t need = lo_ - partial;  // x^2 > need
      std::int64_t a = need < 0 ? 0 : isqrt(need) + 1;
      if (orbits_) {
        for (std::int64_t x = std::max(a, cur_[i - 1]); x <= b; ++x) {
          if (std::gcd(g, x) != 1) continue;
          cur_[i] = x;
          emit(partial + x * x);
        }
        return;
      }
      auto visit = [&](std::int64_t x) {
        if (std::gcd(g, iabs(x)) != 1) return;
        cur_[i] = x;
        emit(partial + x * x);
      };
      if (a == 0) {
        visit(0);
        a = 1;
      }
      for (std::int64_t x = -b; x <= -a; ++x) visit(x);
      for (std::int64_t x = a; x <= b; ++x) visit(x);
      return;
    }
    if (orbits_) {
      const std::int64_t lower = i == 0 ? 0 : cur_[i - 1];
      const std::int64_t upper = isqrt((hi_ - partial) / static_cast<std::int64_t>(n_ - i));
      for (std::int64_t x = lower; x <= upper; ++x) {
        cur_[i] = x;
        recurse(i + 1, partial + x * x, std::gcd(g, x));
      }
      return;
    }
    const std::int64_t upper = isqrt(hi_ - partial);
    for (std::int64_t x = -upper; x <= upper; ++x) {
      cur_[i] = x;
      recurse(i + 1, partial + x * x, std::gcd(g, iabs(x)));
    }
  }

  std::size_t n_;
  bool orbits_;
  std::int64_t lo_;
  std::int64_t hi_;
  PrimitiveBlock& out_;
  std::array<std::int64_t, kMaxDimension> cur_{};
};

void sort_block(PrimitiveBlock& b) {
  const std::size_t n = b.n;
  std::vector<std::uint32_t> idx(b.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t x, std::uint32_t y) {
    if (b.norm_sq[x] != b.norm_sq[y]) return b.norm_sq[x] < b.norm_sq[y];
    return std::lexicographical_compare(b.vec(x), b.vec(x) + n, b.vec(y), b.vec(y) + n);
  });
  PrimitiveBlock s;
  s.n = n;
  s.coords.reserve(b.coords.size());
  s.norm_sq.reserve(b.size());
  s.weight.reserve(b.size());
  for (std::uint32_t i : idx) {
    s.coords.insert(s.coords.end(), b.vec(i), b.vec(i) + n);
    s.norm_sq.push_back(b.norm_sq[i]);
    s.weight.push_back(b.weight[i]);
  }
  b = std::move(s);
}

}  // namespace

std::int64_t squared_radius(double radius) {
  if (!(radius >= 0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be finite and nonnegative");
  const long double r = radius;
  return static_cast<std::int64_t>(std::floor(r * r * (1 + 1e-12L)));
}

std::uint32_t orbit_size(std::span<const std::int64_t> sorted_abs) {
  std::uint32_t perms = 1;
  for (std::uint32_t k = 2; k <= sorted_abs.size(); ++k) perms *= k;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted_abs.size(); ++i) {
    if (i < sorted_abs.size() && sorted_abs[i] == sorted_abs[i - 1]) {
      ++run;
      continue;
    }
    for (std::uint32_t k = 2; k <= run; ++k) perms /= k;
    run = 1;
  }
  for (std::int64_t e : sorted_abs)
    if (e != 0) perms *= 2;
  return perms;
}

bool on_symmetry_wall(std::span<const std::int64_t> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) return true;
    for (std::size_t j = 0; j < i; ++j)
      if (v[i] == v[j] || v[i] == -v[j]) return true;
  }
  return false;
}

void orbit_member(std::span<const std::int64_t> sorted_abs, std::uint64_t seed, std::span<std::int64_t> out) {
  std::uint64_t stream = derive_stream({seed, sorted_abs.size()});
  for (std::int64_t e : sorted_abs) stream = splitmix64(stream ^ splitmix64(static_cast<std::uint64_t>(e)));
  CounterRng rng(stream);
  std::copy(sorted_abs.begin(), sorted_abs.end(), out.begin());
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
  for (auto& e : out)
    if (rng() & 1) e = -e;
}

bool is_orbit_sample(std::span<const std::int64_t> v, std::uint64_t seed) {
  if (on_symmetry_wall(v)) return false;
  std::array<std::int64_t, kMaxDimension> abs{}, member{};
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) abs[i] = v[i] < 0 ? -v[i] : v[i];
  std::sort(abs.begin(), abs.begin() + static_cast<std::ptrdiff_t>(n));
  orbit_member(std::span<const std::int64_t>(abs.data(), n), seed, std::span<std::int64_t>(member.data(), n));
  return std::equal(v.begin(), v.end(), member.begin());
}

void enumerate_primitive(std::size_t n, double radius, EnumerationMode mode,
                         const std::function<void(const PrimitiveBlock&)>& sink) {
  check_dimension(n);
  const std::int64_t r2 = squared_radius(radius);
  if (r2 < 1) return;
  const double ball = std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1) * std::pow(radius, static_cast<double>(n));
  double estimate = ball;
  if (mode == EnumerationMode::orbits) estimate /= std::tgamma(n + 1.0) * std::pow(2.0, static_cast<double>(n));
  const auto blocks = static_cast<std::int64_t>(std::clamp(estimate / 65536.0, 1.0, 4096.0));

  std::int64_t lo = 0;
  for (std::int64_t k = 1; k <= blocks; ++k) {
    std::int64_t hi = k == blocks ? r2
                                  : static_cast<std::int64_t>(std::floor(static_cast<double>(r2) *
                                                                         std::pow(static_cast<double>(k) / blocks, 2.0 / n)));
    if (hi <= lo) continue;
    PrimitiveBlock block;
    block.n = n;
    BlockBuilder(n, mode, lo, hi, block).run();
    lo = hi;
    if (block.size() == 0) continue;
    sort_block(block);
    sink(block);
  }
}

std::vector<IntVec> enumerate_primitive(std::size_t n, double radius) {
  std::vector<IntVec> out;
  enumerate_primitive(n, radius, EnumerationMode::full, [&](const PrimitiveBlock& b) {
    for (std::size_t i = 0; i < b.size(); ++i) out.push_back(to_intvec(std::span<const std::int64_t>(b.vec(i), n)));
  });
  return out;
}

std::uint64_t count_primitive(std::size_t n, double radius) {
  std::uint64_t total = 0;
  enumerate_primitive(n, radius, EnumerationMode::orbits, [&](const PrimitiveBlock& b) {
    for (std::uint32_t w : b.weight) total += w;
  });
  return total;
}

IntVec shortest_solution(const IntVec& v, const IntLattice& orthogonal, bool* tie) {
  const IntVec w0 = particular_solution(v);
  const Integer vv = norm_sq(v);
  RationalVec target(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational q(v[i], vv);
    q.canonicalize();
    target[i] = w0[i] - q;
  }
  const auto y = orthogonal.coordinates(target);
  if (!y) throw std::invalid_argument("lattice is not the orthogonal lattice of v");
  IntVec best;
  const auto minimizers = closest_points(orthogonal.gram(), *y);
  for (const auto& c : minimizers) {
    const IntVec p = orthogonal.combine(c);
    IntVec w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = w0[i] - p[i];
    if (best.empty() || lex_less(w, best)) best = std::move(w);
  }
  if (tie) *tie = minimizers.size() > 1;
  return best;
}

IntVec shortest_solution(const IntVec& v) {
  if (!is_primitive(v)) throw std::domain_error("equation unsolvable");
  return shortest_solution(v, orthogonal_lattice(v), nullptr);
}

GcdRecord build_record(const IntVec& v) {
  check_dimension(v.size());
  GcdRecord rec;
  rec.v = v;
  const IntLattice lattice = orthogonal_lattice(v);
  ReducedBasis reduced = siegel_reduce(lattice);
  bool tie = false;
  rec.w = shortest_solution(v, reduced.lattice, &tie);
  rec.rho_sq = covering_radius(reduced.lattice);
  RICoords ri = refined_iwasawa(v, rec.w, reduced);

  const Integer vv = norm_sq(v);
  const Integer ww = norm_sq(rec.w);
  rec.norm_v = std::sqrt(vv.get_d());
  rec.direction = ri.u;
  rec.norm_w = std::sqrt(ww.get_d());
  rec.w_perp = std::move(ri.w_perp);
  rec.rho = std::sqrt(rec.rho_sq.get_d());
  rec.ratio = std::sqrt(Rational(ww / rec.rho_sq).get_d());
  rec.ratio_perp = std::sqrt(Rational(norm_sq(rec.w_perp) / rec.rho_sq).get_d());
  rec.ratio_naive = std::sqrt(Rational(ww / Rational(vv)).get_d());
  rec.shape_z = std::move(ri.z);
  rec.s = std::move(ri.s);
  rec.x = std::move(ri.x);
  rec.x_exact = std::move(ri.x_exact);
  rec.reduced = std::move(reduced);
  if (vv == 1) rec.flags |= kUnitVector;
  if (tie) rec.flags |= kCvpTie;
  return rec;
}

std::string verify_record(const GcdRecord& rec) {
  const std::size_t n = rec.v.size();
  if (dot(rec.v, rec.w) != 1) return "<v, w> != 1";
  const Integer vv = norm_sq(rec.v);
  for (std::size_t i = 0; i < n; ++i) {
    Rational q(rec.v[i], vv);
    q.canonicalize();
    if (rec.w[i] - rec.w_perp[i] != q) return "w - w_perp != v / |v|^2";
  }
  Rational cross = 0;
  for (std::size_t i = 0; i < n; ++i) cross += rec.w_perp[i] * rec.v[i];
  if (cross != 0) return "w_perp not orthogonal to v";
  const Rational perp_sq = norm_sq(rec.w_perp);
  if (perp_sq > rec.rho_sq) return "|w_perp|^2 > rho^2";
  Rational inv(1, vv);
  inv.canonicalize();
  if (Rational(norm_sq(rec.w)) != perp_sq + inv) return "|w|^2 != |w_perp|^2 + 1/|v|^2";
  if (rec.reduced.lattice.combine(rec.x_exact) != rec.w_perp) return "x does not reproduce w_perp";
  if (!(rec.ratio_perp >= 0 && rec.ratio_perp <= 1)) return "ratio_perp outside [0, 1]";
  if (std::abs(rec.norm_w - std::sqrt(perp_sq.get_d())) > 1 / rec.norm_v * (1 + 1e-12)) return "|w| - |w_perp| > 1/|v|";
  return {};
}

double n2_normalized_ratio(const GcdRecord& rec) {
  if (rec.v.size() != 2) throw std::invalid_argument("n2_normalized_ratio requires n = 2");
  return rec.norm_w / (rec.norm_v / 2);
}

}  // namespace primlat
