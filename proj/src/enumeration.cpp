#include "primlat/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace primlat {

namespace {

struct ExactGs {
  std::vector<Rational> d;
  std::vector<RationalVec> mu;  // mu[i][j], j < i
};

ExactGs gs_from_gram(const IntMatrix& g) {
  const std::size_t m = g.rows();
  ExactGs gs{std::vector<Rational>(m), std::vector<RationalVec>(m, RationalVec(m))};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Rational r = g(i, j);
      for (std::size_t k = 0; k < j; ++k) r -= gs.mu[i][k] * gs.mu[j][k] * gs.d[k];
      gs.mu[i][j] = r / gs.d[j];
    }
    Rational di = g(i, i);
    for (std::size_t k = 0; k < i; ++k) di -= gs.mu[i][k] * gs.mu[i][k] * gs.d[k];
    if (di <= 0) throw std::invalid_argument("Gram matrix is not positive definite");
    gs.d[i] = di;
  }
  return gs;
}

// b_k -= q * b_j, applied to the Gram matrix and the transform.
void subtract_multiple(IntMatrix& g, IntMatrix& u, std::size_t k, std::size_t j, const Integer& q) {
  const std::size_t m = g.rows();
  const Integer kk = g(k, k) - 2 * q * g(k, j) + q * q * g(j, j);
  for (std::size_t i = 0; i < m; ++i) {
    if (i == k) continue;
    g(i, k) -= q * g(i, j);
    g(k, i) = g(i, k);
  }
  g(k, k) = kk;
  u.add_column_multiple(k, j, -q);
}

void swap_basis(IntMatrix& g, IntMatrix& u, std::size_t a, std::size_t b) {
  g.swap_columns(a, b);
  for (std::size_t c = 0; c < g.cols(); ++c) swap(g(a, c), g(b, c));
  u.swap_columns(a, b);
}

IntMatrix transform_gram(const IntMatrix& g, const IntMatrix& u) { return u.transpose() * g * u; }

struct DoubleGs {
  std::vector<double> d;
  std::vector<std::vector<double>> mu;
};

void enumerate_reduced(const IntMatrix& g2, const IntMatrix& u, const RationalVec& c2,
                       const Rational& bound, const std::function<void(const IntVec&)>& visit,
                       std::size_t max_points) {
  const std::size_t m = g2.rows();
  const ExactGs egs = gs_from_gram(g2);
  DoubleGs gs{std::vector<double>(m), std::vector<std::vector<double>>(m, std::vector<double>(m))};
  for (std::size_t i = 0; i < m; ++i) {
    gs.d[i] = egs.d[i].get_d();
    for (std::size_t j = 0; j < i; ++j) gs.mu[i][j] = egs.mu[i][j].get_d();
  }
  // Enumerate around the fractional part of the center; doubles only ever see
  // small offsets.
  IntVec shift(m);
  RationalVec frac(m);
  std::vector<double> c(m);
  for (std::size_t i = 0; i < m; ++i) {
    shift[i] = round_nearest(c2[i]);
    frac[i] = c2[i] - shift[i];
    c[i] = frac[i].get_d();
  }
  const double b = bound.get_d();
  const double limit = b * (1 + 1e-9) + 1e-9;

  std::vector<long long> y(m);
  std::size_t reported = 0;
  IntVec y2(m);

  // level i, sum of the contributions of levels > i
  std::function<void(std::size_t, double)> recurse = [&](std::size_t i, double partial) {
    double ctr = c[i];
    for (std::size_t j = i + 1; j < m; ++j) ctr -= gs.mu[j][i] * (static_cast<double>(y[j]) - c[j]);
    const double rem = limit - partial;
    if (rem < 0) return;
    const double half = std::sqrt(rem / gs.d[i]) + 1e-9;
    const long long lo = static_cast<long long>(std::ceil(ctr - half));
    const long long hi = static_cast<long long>(std::floor(ctr + half));
    for (long long t = lo; t <= hi; ++t) {
      y[i] = t;
      const double diff = static_cast<double>(t) - ctr;
      const double next = partial + gs.d[i] * diff * diff;
      if (next > limit) continue;
      if (i > 0) {
        recurse(i - 1, next);
        continue;
      }
      for (std::size_t k = 0; k < m; ++k) y2[k] = static_cast<long>(y[k]);
      if (quadratic_form(g2, y2, frac) > bound) continue;
      for (std::size_t k = 0; k < m; ++k) y2[k] += shift[k];
      if (++reported > max_points) throw std::length_error("enumeration exceeded point budget");
      visit(u * y2);
    }
  };
  recurse(m - 1, 0.0);
}

RationalVec mat_vec(const IntMatrix& a, const RationalVec& x) {
  RationalVec y(a.rows(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) y[i] += a(i, k) * x[k];
  return y;
}

}  // namespace

bool lex_less(const IntVec& a, const IntVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

IntMatrix lll_transform(const IntMatrix& gram) {
  const std::size_t m = gram.rows();
  IntMatrix g = gram;
  IntMatrix u = IntMatrix::identity(m);
  if (m < 2) return u;
  const Rational delta(99, 100);
  std::size_t k = 1;
  while (k < m) {
    ExactGs gs = gs_from_gram(g);
    for (std::size_t j = k; j-- > 0;) {
      const Integer q = round_nearest(gs.mu[k][j]);
      if (q == 0) continue;
      subtract_multiple(g, u, k, j, q);
      gs.mu[k][j] -= q;
      for (std::size_t i = 0; i < j; ++i) gs.mu[k][i] -= q * gs.mu[j][i];
    }
    const Rational& mu = gs.mu[k][k - 1];
    if (gs.d[k] < (delta - mu * mu) * gs.d[k - 1]) {
      swap_basis(g, u, k, k - 1);
      k = std::max<std::size_t>(k - 1, 1);
    } else {
      ++k;
    }
  }
  return u;
}

IntMatrix unimodular_inverse(const IntMatrix& u) {
  const std::size_t m = u.rows();
  const Integer det = determinant(u);
  if (det != 1 && det != -1) throw std::domain_error("matrix is not unimodular");
  std::vector<RationalVec> a(m, RationalVec(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a[i][j] = u(i, j);
  IntMatrix inv(m, m);
  for (std::size_t c = 0; c < m; ++c) {
    RationalVec e(m, Rational(0));
    e[c] = 1;
    const auto x = solve(a, e);
    for (std::size_t r = 0; r < m; ++r) inv(r, c) = x->at(r).get_num();
  }
  return inv;
}

IntMatrix clear_denominators(const std::vector<RationalVec>& q, Integer* scale) {
  Integer l = 1;
  for (const auto& row : q)
    for (const auto& e : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.get_den_mpz_t());
  IntMatrix out(q.size(), q.empty() ? 0 : q.front().size());
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q[i].size(); ++j) out(i, j) = q[i][j].get_num() * (l / q[i][j].get_den());
  if (scale) *scale = l;
  return out;
}

Rational quadratic_form(const IntMatrix& gram, const IntVec& y, const RationalVec& center) {
  const std::size_t m = y.size();
  RationalVec z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = center.empty() ? Rational(y[i]) : y[i] - center[i];
  Rational s = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (z[i] == 0) continue;
    Rational row = 0;
    for (std::size_t j = 0; j < m; ++j) row += gram(i, j) * z[j];
    s += z[i] * row;
  }
  return s;
}

Integer quadratic_form(const IntMatrix& gram, const IntVec& y) {
  Integer s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    Integer row = 0;
    for (std::size_t j = 0; j < y.size(); ++j) row += gram(i, j) * y[j];
    s += y[i] * row;
  }
  return s;
}

void enumerate_within(const IntMatrix& gram, const RationalVec& center, const Rational& bound,
                      const std::function<void(const IntVec&)>& visit, std::size_t max_points) {
  if (bound < 0) return;
  const IntMatrix u = lll_transform(gram);
  const IntMatrix g2 = transform_gram(gram, u);
  const RationalVec c = center.empty() ? RationalVec(gram.rows(), Rational(0)) : center;
  enumerate_reduced(g2, u, mat_vec(unimodular_inverse(u), c), bound, visit, max_points);
}

std::vector<IntVec> minimal_vectors(const IntMatrix& gram, Rational* minimum) {
  const std::size_t m = gram.rows();
  const IntMatrix u = lll_transform(gram);
  const IntMatrix g2 = transform_gram(gram, u);
  Integer bound = g2(0, 0);
  for (std::size_t i = 1; i < m; ++i) bound = std::min(bound, Integer(g2(i, i)));
  std::vector<std::pair<Integer, IntVec>> found;
  enumerate_reduced(g2, u, RationalVec(m, Rational(0)), Rational(bound), [&](const IntVec& y) {
    Integer q = quadratic_form(gram, y);
    if (q != 0) found.emplace_back(std::move(q), y);
  }, 1'000'000);
  Integer best = bound;
  for (const auto& [q, y] : found) best = std::min(best, q);
  std::vector<IntVec> out;
  for (auto& [q, y] : found)
    if (q == best) out.push_back(std::move(y));
  std::sort(out.begin(), out.end(), lex_less);
  if (minimum) *minimum = best;
  return out;
}

std::vector<IntVec> closest_points(const IntMatrix& gram, const RationalVec& center, Rational* minimum) {
  const std::size_t m = gram.rows();
  const IntMatrix u = lll_transform(gram);
  const IntMatrix g2 = transform_gram(gram, u);
  const RationalVec c2 = mat_vec(unimodular_inverse(u), center);
  IntVec y0(m);
  for (std::size_t i = 0; i < m; ++i) y0[i] = round_nearest(c2[i]);
  const Rational bound = quadratic_form(g2, y0, c2);
  std::vector<std::pair<Rational, IntVec>> found;
  enumerate_reduced(g2, u, c2, bound, [&](const IntVec& y) {
    found.emplace_back(quadratic_form(gram, y, center), y);
  }, 1'000'000);
  if (found.empty()) throw std::logic_error("closest point search lost the rounding point");
  Rational best = bound;
  for (const auto& [q, y] : found) best = std::min(best, q);
  std::vector<IntVec> out;
  for (auto& [q, y] : found)
    if (q == best) out.push_back(std::move(y));
  std::sort(out.begin(), out.end(), lex_less);
  if (minimum) *minimum = best;
  return out;
}

}  // namespace primlat
