#include "primlat/reduction.hpp"

#include "primlat/enumeration.hpp"

#include <cmath>
#include <stdexcept>

namespace primlat {

namespace {

// b_j^* as exact ambient vectors.
std::vector<RationalVec> gs_vectors(const IntMatrix& basis, std::size_t count, std::vector<Rational>& d) {
  std::vector<RationalVec> star;
  d.clear();
  for (std::size_t j = 0; j < count; ++j) {
    RationalVec b = to_rational(basis.column(j));
    for (std::size_t i = 0; i < j; ++i) {
      const Rational mu = dot(b, star[i]) / d[i];
      if (mu == 0) continue;
      for (std::size_t r = 0; r < b.size(); ++r) b[r] -= mu * star[i][r];
    }
    d.push_back(norm_sq(b));
    star.push_back(std::move(b));
  }
  return star;
}

Rational dot_mixed(const IntVec& a, const RationalVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Unimodular matrix whose first column is the primitive vector y.
IntMatrix complete_to_basis(const IntVec& y) {
  const std::size_t k = y.size();
  IntMatrix row(1, k);
  for (std::size_t i = 0; i < k; ++i) row(0, i) = y[i];
  const HnfResult r = hnf_with_transform(row);
  if (r.h(0, 0) != 1) throw std::logic_error("projected minimum is not primitive");
  return unimodular_inverse(r.transform).transpose();
}

}  // namespace

int iota(std::size_t m) { return m % 2 == 0 ? 2 : 1; }

ExactGramSchmidt exact_gram_schmidt(const IntMatrix& gram) {
  const std::size_t m = gram.rows();
  ExactGramSchmidt gs{std::vector<Rational>(m), std::vector<RationalVec>(m, RationalVec(m, Rational(0)))};
  for (std::size_t j = 0; j < m; ++j) {
    gs.mu[j][j] = 1;
    for (std::size_t i = 0; i < j; ++i) {
      Rational r = gram(i, j);
      for (std::size_t k = 0; k < i; ++k) r -= gs.mu[k][j] * gs.mu[k][i] * gs.d[k];
      gs.mu[i][j] = r / gs.d[i];
    }
    Rational dj = gram(j, j);
    for (std::size_t k = 0; k < j; ++k) dj -= gs.mu[k][j] * gs.mu[k][j] * gs.d[k];
    if (dj <= 0) throw std::invalid_argument("lattice basis is rank-deficient");
    gs.d[j] = dj;
  }
  return gs;
}

GramSchmidtData gram_schmidt(const IntLattice& lattice) {
  const std::size_t m = lattice.rank();
  std::vector<Rational> d;
  const auto star = gs_vectors(lattice.basis(), m, d);
  const ExactGramSchmidt egs = exact_gram_schmidt(lattice.gram());
  GramSchmidtData out;
  out.a.resize(m);
  out.phi.resize(m);
  out.mu.assign(m, RealVec(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    out.a[j] = std::sqrt(d[j].get_d());
    out.phi[j] = to_double(star[j]);
    for (double& e : out.phi[j]) e /= out.a[j];
    for (std::size_t i = 0; i <= j; ++i) out.mu[i][j] = egs.mu[i][j].get_d();
  }
  return out;
}

ReducedBasis siegel_reduce(const IntLattice& lattice) {
  const std::size_t m = lattice.rank();
  if (m > kMaxReducedRank) throw std::invalid_argument("unsupported rank");
  IntMatrix basis = lattice.basis();
  IntMatrix transform = IntMatrix::identity(m);

  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Rational> d;
    const auto star = gs_vectors(basis, j, d);
    const std::size_t k = m - j;

    std::vector<IntVec> minima;
    if (k == 1) {
      minima = {IntVec{Integer(-1)}, IntVec{Integer(1)}};
    } else {
      std::vector<RationalVec> proj;
      for (std::size_t a = 0; a < k; ++a) {
        RationalVec p = to_rational(basis.column(j + a));
        for (std::size_t i = 0; i < j; ++i) {
          const Rational mu = dot(p, star[i]) / d[i];
          for (std::size_t r = 0; r < p.size(); ++r) p[r] -= mu * star[i][r];
        }
        proj.push_back(std::move(p));
      }
      std::vector<RationalVec> pg(k, RationalVec(k));
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) pg[a][b] = dot(proj[a], proj[b]);
      minima = minimal_vectors(clear_denominators(pg));
    }

    IntVec best_u;
    IntVec best_c;
    for (const auto& y : minima) {
      IntVec c(m, Integer(0));
      IntVec u(basis.rows(), Integer(0));
      for (std::size_t a = 0; a < k; ++a) {
        c[j + a] = y[a];
        if (y[a] == 0) continue;
        for (std::size_t r = 0; r < u.size(); ++r) u[r] += y[a] * basis(r, j + a);
      }
      for (std::size_t i = j; i-- > 0;) {
        const Integer q = round_nearest(dot_mixed(u, star[i]) / d[i]);
        if (q == 0) continue;
        for (std::size_t r = 0; r < u.size(); ++r) u[r] -= q * basis(r, i);
        c[i] -= q;
      }
      if (best_u.empty() || lex_less(u, best_u)) {
        best_u = std::move(u);
        best_c = std::move(c);
      }
    }

    const IntMatrix completion = complete_to_basis(IntVec(best_c.begin() + static_cast<std::ptrdiff_t>(j), best_c.end()));
    IntMatrix e = IntMatrix::identity(m);
    for (std::size_t r = 0; r < m; ++r) e(r, j) = best_c[r];
    for (std::size_t a = 1; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) e(j + b, j + a) = completion(b, a);
    basis = basis * e;
    transform = transform * e;
  }

  ExactGramSchmidt egs = exact_gram_schmidt(IntLattice(basis).gram());
  for (std::size_t j = static_cast<std::size_t>(iota(m)); j < m; ++j) {
    if (egs.mu[0][j] < 0) {
      basis.negate_column(j);
      transform.negate_column(j);
    }
  }
  if (determinant(transform) < 0) {
    if (m % 2 == 1) {
      for (std::size_t j = 0; j < m; ++j) {
        basis.negate_column(j);
        transform.negate_column(j);
      }
    } else {
      basis.negate_column(1);
      transform.negate_column(1);
    }
  }

  ReducedBasis out;
  out.lattice = IntLattice(std::move(basis));
  out.exact = exact_gram_schmidt(out.lattice.gram());
  out.gsd = gram_schmidt(out.lattice);
  out.transform = std::move(transform);
  return out;
}

RealVec flag_covolumes(const ReducedBasis& reduced) {
  RealVec out;
  double p = 1;
  for (double a : reduced.gsd.a) out.push_back(p *= a);
  return out;
}

RealMatrix shape_of(const ReducedBasis& reduced) {
  const std::size_t m = reduced.gsd.a.size();
  const double scale = std::exp(0.5 * std::log(reduced.lattice.covol_sq().get_d()) / static_cast<double>(m));
  RealMatrix z(m, RealVec(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) z[i][j] = reduced.gsd.a[i] * reduced.gsd.mu[i][j] / scale;
  return z;
}

RealMatrix shape(const IntLattice& lattice) { return shape_of(siegel_reduce(lattice)); }

RICoords refined_iwasawa(const IntVec& v, const IntVec& w) {
  return refined_iwasawa(v, w, siegel_reduce(orthogonal_lattice(v)));
}

RICoords refined_iwasawa(const IntVec& v, const IntVec& w, const ReducedBasis& reduced) {
  if (v.size() != w.size() || dot(v, w) != 1) throw std::domain_error("not in G_v");
  const std::size_t n = v.size();
  const std::size_t m = n - 1;
  if (reduced.lattice.rank() != m || reduced.lattice.dim() != n)
    throw std::invalid_argument("reduced basis does not match v");

  RICoords ri;
  const Integer vv = norm_sq(v);
  ri.w_perp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational q(v[i], vv);
    q.canonicalize();
    ri.w_perp[i] = w[i] - q;
  }
  auto x = reduced.lattice.coordinates(ri.w_perp);
  if (!x) throw std::logic_error("w_perp outside the span of the orthogonal lattice");
  ri.x_exact = std::move(*x);
  ri.x = to_double(ri.x_exact);

  ri.t = 0.5 * std::log(vv.get_d());
  const double norm_v = std::sqrt(vv.get_d());
  ri.u = to_double(v);
  for (double& e : ri.u) e /= norm_v;
  double log_covol = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    log_covol += std::log(reduced.gsd.a[i - 1]);
    ri.s.push_back(2 * (static_cast<double>(i) * ri.t / static_cast<double>(m) - log_covol));
  }
  ri.z = shape_of(reduced);
  ri.reduced = reduced;
  return ri;
}

RealMatrix reconstruct(const RICoords& ri) {
  const std::size_t n = ri.u.size();
  const std::size_t m = n - 1;
  RealVec app(m, 1.0);  // a''
  if (m >= 2) {
    app[0] = std::exp(-ri.s[0] / 2);
    for (std::size_t i = 1; i + 1 < m; ++i) app[i] = std::exp((ri.s[i - 1] - ri.s[i]) / 2);
    app[m - 1] = std::exp(ri.s[m - 2] / 2);
  }
  const double ap = std::exp(ri.t / static_cast<double>(m));  // a' on v^perp

  // diag(a_1..a_m, e^{-t}) * [[N, N x], [0, 1]]
  RealMatrix q(n, RealVec(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const double ai = app[i] * ap;
    double nx = 0;
    for (std::size_t j = i; j < m; ++j) {
      const double nij = ri.z[i][j] / ri.z[i][i];
      q[i][j] = ai * nij;
      nx += nij * ri.x[j];
    }
    q[i][m] = ai * nx;
  }
  q[m][m] = std::exp(-ri.t);

  RealMatrix g(n, RealVec(n, 0.0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0;
      for (std::size_t k = 0; k < m; ++k) acc += ri.reduced.gsd.phi[k][r] * q[k][c];
      acc += ri.u[r] * q[m][c];
      g[r][c] = acc;
    }
  return g;
}

}  // namespace primlat
