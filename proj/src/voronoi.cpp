#include "primlat/voronoi.hpp"

#include "primlat/enumeration.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>
#include <stdexcept>

namespace primlat {

namespace {

IntMatrix adjugate(const IntMatrix& a) {
  const std::size_t m = a.rows();
  IntMatrix adj(m, m);
  if (m == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      IntMatrix minor(m - 1, m - 1);
      for (std::size_t r = 0, rr = 0; r < m; ++r) {
        if (r == j) continue;
        for (std::size_t c = 0, cc = 0; c < m; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = a(r, c);
        }
        ++rr;
      }
      adj(i, j) = determinant(minor);
      if ((i + j) % 2 == 1) adj(i, j) = -adj(i, j);
    }
  return adj;
}

bool rational_lex_less(const RationalVec& a, const RationalVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void warn_rank4_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    std::cerr << "warning: rank-4 Voronoi vertex enumeration is slow\n";
  });
}

struct CellData {
  std::vector<IntVec> relevant;
  std::vector<RationalVec> vertices;
  Rational rho_sq;
};

// Solves all m-subsets of bisector equalities over the relevant pairs in
// scaled integer form: for A y = eps * q / 2 with adj(A), det(A) we carry
// Y = 2 det(A) y.
CellData cell_from_gram(const IntMatrix& gram, bool keep_vertices) {
  const std::size_t m = gram.rows();
  if (m == 0) throw std::invalid_argument("rank must be positive");
  if (m > kMaxReducedRank) throw std::invalid_argument("unsupported rank");
  if (m == 4) warn_rank4_once();
  CellData cell;
  cell.relevant = relevant_coefficients(gram);

  std::vector<IntVec> pair_g;
  std::vector<Integer> pair_q;
  for (const auto& r : cell.relevant) {
    if (!lex_less(IntVec(m, Integer(0)), r)) continue;  // one representative per +- pair
    pair_g.push_back(gram * r);
    pair_q.push_back(quadratic_form(gram, r));
  }
  const std::size_t p = pair_g.size();

  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  cell.rho_sq = 0;
  IntMatrix a(m, m);
  IntVec rhs(m);
  IntVec y(m);
  while (true) {
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t c = 0; c < m; ++c) a(k, c) = pair_g[pick[k]][c];
    const Integer det = determinant(a);
    if (det != 0) {
      const IntMatrix adj = adjugate(a);
      const Integer abs_det = abs(det);
      for (std::size_t signs = 0; signs < (std::size_t{1} << m); ++signs) {
        for (std::size_t k = 0; k < m; ++k) rhs[k] = (signs >> k & 1) ? Integer(-pair_q[pick[k]]) : pair_q[pick[k]];
        y = adj * rhs;
        bool inside = true;
        for (std::size_t r = 0; r < p && inside; ++r) {
          const Integer s = abs(dot(pair_g[r], y));
          inside = s <= pair_q[r] * abs_det;
        }
        if (!inside) continue;
        const Integer two_det = 2 * det;
        Rational nsq(quadratic_form(gram, y), two_det * two_det);
        nsq.canonicalize();
        if (nsq > cell.rho_sq) cell.rho_sq = nsq;
        if (keep_vertices) {
          RationalVec vert(m);
          for (std::size_t c = 0; c < m; ++c) {
            vert[c] = Rational(y[c], two_det);
            vert[c].canonicalize();
          }
          cell.vertices.push_back(std::move(vert));
        }
      }
    }
    // next m-subset of the p pairs
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == p - m + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < m; ++k) pick[k] = pick[k - 1] + 1;
  }
  if (keep_vertices) {
    std::sort(cell.vertices.begin(), cell.vertices.end(), rational_lex_less);
    cell.vertices.erase(std::unique(cell.vertices.begin(), cell.vertices.end()), cell.vertices.end());
  }
  return cell;
}

}  // namespace

IntVec shortest_vector(const IntLattice& lattice) {
  IntVec best;
  for (const auto& y : minimal_vectors(lattice.gram())) {
    IntVec u = lattice.combine(y);
    if (best.empty() || lex_less(u, best)) best = std::move(u);
  }
  return best;
}

IntVec closest_vector(const IntLattice& lattice, const RationalVec& target) {
  const auto y = lattice.coordinates(target);
  if (!y) throw std::invalid_argument("target outside the span of the lattice");
  return closest_points(lattice.gram(), *y).front();
}

std::vector<IntVec> relevant_coefficients(const IntMatrix& gram) {
  const std::size_t m = gram.rows();
  if (m > kMaxReducedRank) throw std::invalid_argument("unsupported rank");
  std::vector<IntVec> out;
  for (std::size_t cls = 1; cls < (std::size_t{1} << m); ++cls) {
    RationalVec center(m);
    for (std::size_t i = 0; i < m; ++i) center[i] = (cls >> i & 1) ? Rational(-1, 2) : Rational(0);
    const auto z = closest_points(gram, center);
    if (z.size() != 2) continue;
    for (const auto& zz : z) {
      IntVec r(m);
      for (std::size_t i = 0; i < m; ++i) r[i] = 2 * zz[i] + static_cast<long>(cls >> i & 1);
      out.push_back(std::move(r));
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

std::vector<IntVec> relevant_vectors(const IntLattice& lattice) {
  std::vector<IntVec> out;
  for (const auto& r : relevant_coefficients(lattice.gram())) out.push_back(lattice.combine(r));
  return out;
}

VoronoiCell voronoi_cell(const IntLattice& lattice) {
  CellData d = cell_from_gram(lattice.gram(), true);
  return VoronoiCell{lattice, std::move(d.relevant), std::move(d.vertices), std::move(d.rho_sq)};
}

Rational covering_radius_sq(const IntMatrix& gram) {
  if (gram.rows() == 1) {
    Rational r(gram(0, 0), 4);
    r.canonicalize();
    return r;
  }
  return cell_from_gram(gram, false).rho_sq;
}

Rational covering_radius(const IntLattice& lattice) { return covering_radius_sq(lattice.gram()); }

RationalVec reduce_to_cell(const IntLattice& lattice, const RationalVec& target) {
  const IntVec c = closest_vector(lattice, target);
  const IntVec p = lattice.combine(c);
  RationalVec out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) out[i] = target[i] - p[i];
  return out;
}

CellSampler::CellSampler(const VoronoiCell& cell) : rho_sq_(cell.rho_sq.get_d()) {
  const IntMatrix& g = cell.lattice.gram();
  const std::size_t m = g.rows();
  gram_.assign(m, RealVec(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) gram_[i][j] = g(i, j).get_d();
  for (const auto& r : cell.relevant) {
    relevant_.push_back(to_double(r));
    relevant_g_.push_back(to_double(g * r));
    half_norm_.push_back(quadratic_form(g, r).get_d() / 2);
  }
}

double CellSampler::sample(CounterRng& rng, RealVec& coeffs) const {
  const std::size_t m = gram_.size();
  coeffs.resize(m);
  for (std::size_t i = 0; i < m; ++i) coeffs[i] = rng.uniform();
  // Iterative slicer: each step strictly shortens the point.
  for (int guard = 0; guard < 10'000; ++guard) {
    bool moved = false;
    for (std::size_t k = 0; k < relevant_.size(); ++k) {
      double s = 0;
      for (std::size_t i = 0; i < m; ++i) s += relevant_g_[k][i] * coeffs[i];
      if (s > half_norm_[k] * (1 + 1e-12)) {
        for (std::size_t i = 0; i < m; ++i) coeffs[i] -= relevant_[k][i];
        moved = true;
      }
    }
    if (!moved) break;
  }
  double nsq = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) nsq += coeffs[i] * gram_[i][j] * coeffs[j];
  return nsq;
}

RealVec sample_cell(const IntLattice& lattice, std::uint64_t seed) {
  const CellSampler sampler(voronoi_cell(lattice));
  CounterRng rng(derive_stream({seed, lattice.hash()}));
  RealVec coeffs;
  sampler.sample(rng, coeffs);
  RealVec out(lattice.dim(), 0.0);
  for (std::size_t r = 0; r < lattice.dim(); ++r)
    for (std::size_t c = 0; c < coeffs.size(); ++c) out[r] += lattice.basis()(r, c).get_d() * coeffs[c];
  return out;
}

}  // namespace primlat
