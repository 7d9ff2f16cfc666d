#include "primlat/exact_core.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace primlat {

IntVec make_intvec(std::initializer_list<long> entries) {
  IntVec v;
  v.reserve(entries.size());
  for (long e : entries) v.emplace_back(e);
  return v;
}

IntVec to_intvec(std::span<const std::int64_t> entries) {
  IntVec v;
  v.reserve(entries.size());
  for (std::int64_t e : entries) v.emplace_back(static_cast<long>(e));
  return v;
}

RationalVec to_rational(const IntVec& v) {
  RationalVec r;
  r.reserve(v.size());
  for (const auto& e : v) r.emplace_back(e);
  return r;
}

std::string to_string(const IntVec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
  os << ')';
  return os.str();
}

Integer dot(const IntVec& a, const IntVec& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational dot(const RationalVec& a, const RationalVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Integer norm_sq(const IntVec& v) { return dot(v, v); }
Rational norm_sq(const RationalVec& v) { return dot(v, v); }

std::vector<double> to_double(const RationalVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

std::vector<double> to_double(const IntVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    for (long e : r) data_.emplace_back(e);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVec>& columns) {
  if (columns.empty()) return {};
  IntMatrix m(columns.front().size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) m.set_column(c, columns[c]);
  return m;
}

IntVec IntMatrix::column(std::size_t c) const {
  IntVec v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

IntVec IntMatrix::row(std::size_t r) const {
  return IntVec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

void IntMatrix::set_column(std::size_t c, const IntVec& v) {
  if (v.size() != rows_) throw std::invalid_argument("column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

void IntMatrix::swap_columns(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < rows_; ++r) swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::negate_column(std::size_t c) {
  for (std::size_t r = 0; r < rows_; ++r) {
    Integer& e = (*this)(r, c);
    mpz_neg(e.get_mpz_t(), e.get_mpz_t());
  }
}

void IntMatrix::add_column_multiple(std::size_t dst, std::size_t src, const Integer& k) {
  if (k == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) {
    mpz_addmul((*this)(r, dst).get_mpz_t(), (*this)(r, src).get_mpz_t(), k.get_mpz_t());
  }
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntMatrix IntMatrix::with_column(const IntVec& v) const {
  if (v.size() != rows_) throw std::invalid_argument("column length mismatch");
  IntMatrix m(rows_, cols_ + 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c);
    m(r, cols_) = v[r];
  }
  return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
  IntMatrix p(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        mpz_addmul(p(i, j).get_mpz_t(), a(i, k).get_mpz_t(), b(k, j).get_mpz_t());
    }
  return p;
}

IntVec operator*(const IntMatrix& a, const IntVec& x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix shape mismatch");
  IntVec y(a.rows(), Integer(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      mpz_addmul(y[i].get_mpz_t(), a(i, k).get_mpz_t(), x[k].get_mpz_t());
  return y;
}

Integer determinant(const IntMatrix& input) {
  if (input.rows() != input.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = input.rows();
  if (n == 0) return 1;
  IntMatrix m = input;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t c = 0; c < n; ++c) swap(m(k, c), m(p, c));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

std::optional<RationalVec> solve(std::vector<RationalVec> a, RationalVec b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != k) {
      std::swap(a[p], a[k]);
      swap(b[p], b[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k] == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  RationalVec x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Hermite normal form

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer round_nearest(const Rational& x) {
  // floor((2p + q) / 2q)
  Integer num = 2 * x.get_num() + x.get_den();
  Integer den = 2 * x.get_den();
  return floor_div(num, den);
}

namespace {

// Replace columns (k, j) of both h and u by the unimodular combination that
// puts gcd(h(r,k), h(r,j)) in column k and zero in column j.
void gcd_column_step(IntMatrix& h, IntMatrix& u, std::size_t r, std::size_t k, std::size_t j) {
  Integer g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h(r, k).get_mpz_t(), h(r, j).get_mpz_t());
  const Integer ak = h(r, k) / g;
  const Integer bj = h(r, j) / g;
  auto apply = [&](IntMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const Integer x = m(i, k);
      const Integer y = m(i, j);
      m(i, k) = s * x + t * y;
      m(i, j) = ak * y - bj * x;
    }
  };
  apply(h);
  apply(u);
}

}  // namespace

HnfResult hnf_with_transform(const IntMatrix& m) {
  HnfResult res{m, IntMatrix::identity(m.cols()), 0};
  IntMatrix& h = res.h;
  IntMatrix& u = res.transform;
  std::size_t k = 0;
  for (std::size_t r = 0; r < h.rows() && k < h.cols(); ++r) {
    for (std::size_t j = k + 1; j < h.cols(); ++j) {
      if (h(r, j) != 0) gcd_column_step(h, u, r, k, j);
    }
    if (h(r, k) == 0) continue;
    if (h(r, k) < 0) {
      h.negate_column(k);
      u.negate_column(k);
    }
    for (std::size_t j = 0; j < k; ++j) {
      const Integer q = floor_div(h(r, j), h(r, k));
      if (q != 0) {
        h.add_column_multiple(j, k, -q);
        u.add_column_multiple(j, k, -q);
      }
    }
    ++k;
  }
  res.rank = k;
  return res;
}

IntMatrix hnf(const IntMatrix& m) { return hnf_with_transform(m).h; }

// ---------------------------------------------------------------------------
// gcd equation

Integer gcd_of(const IntVec& v) {
  Integer g = 0;
  for (const auto& e : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
  return g;
}

bool is_primitive(const IntVec& v) {
  const Integer g = gcd_of(v);
  if (g == 0) throw std::invalid_argument("zero vector has no gcd type");
  return g == 1;
}

IntVec particular_solution(const IntVec& v) {
  IntVec c(v.size(), Integer(0));
  Integer g = 0;
  Integer ng, s, t;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), v[i].get_mpz_t());
    for (std::size_t j = 0; j < i; ++j) c[j] *= s;
    c[i] = t;
    g = ng;
  }
  if (g != 1) throw std::domain_error("equation unsolvable");
  return c;
}

// ---------------------------------------------------------------------------
// IntLattice

IntLattice::IntLattice(IntMatrix basis) : basis_(std::move(basis)) {
  const std::size_t m = basis_.cols();
  gram_ = IntMatrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      Integer s = 0;
      for (std::size_t r = 0; r < basis_.rows(); ++r)
        mpz_addmul(s.get_mpz_t(), basis_(r, i).get_mpz_t(), basis_(r, j).get_mpz_t());
      gram_(i, j) = s;
      gram_(j, i) = s;
    }
  covol_sq_ = determinant(gram_);
  if (m == 0 || covol_sq_ <= 0) throw std::invalid_argument("lattice basis is rank-deficient");
}

IntVec IntLattice::combine(const IntVec& coeffs) const { return basis_ * coeffs; }

RationalVec IntLattice::combine(const RationalVec& coeffs) const {
  RationalVec y(dim(), Rational(0));
  for (std::size_t r = 0; r < dim(); ++r)
    for (std::size_t c = 0; c < rank(); ++c) y[r] += coeffs[c] * basis_(r, c);
  return y;
}

std::optional<RationalVec> IntLattice::coordinates(const RationalVec& target) const {
  if (target.size() != dim()) return std::nullopt;
  const std::size_t m = rank();
  std::vector<RationalVec> g(m, RationalVec(m));
  RationalVec rhs(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) g[i][j] = gram_(i, j);
    for (std::size_t r = 0; r < dim(); ++r) rhs[i] += basis_(r, i) * target[r];
  }
  auto y = solve(std::move(g), std::move(rhs));
  if (!y) return std::nullopt;
  if (combine(*y) != target) return std::nullopt;
  return y;
}

std::uint64_t IntLattice::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ULL;
  };
  mix(basis_.rows());
  mix(basis_.cols());
  for (std::size_t r = 0; r < basis_.rows(); ++r)
    for (std::size_t c = 0; c < basis_.cols(); ++c) {
      const Integer& e = basis_(r, c);
      mix(static_cast<std::uint64_t>(mpz_sgn(e.get_mpz_t()) + 1));
      const std::size_t limbs = mpz_size(e.get_mpz_t());
      for (std::size_t l = 0; l < limbs; ++l) mix(mpz_getlimbn(e.get_mpz_t(), static_cast<mp_size_t>(l)));
    }
  return h;
}

IntLattice orthogonal_lattice(const IntVec& v) {
  if (v.size() < 2) throw std::invalid_argument("dimension must be at least 2");
  if (!is_primitive(v)) throw std::domain_error("orthogonal lattice requires a primitive vector");
  const std::size_t n = v.size();
  IntMatrix row(1, n);
  for (std::size_t i = 0; i < n; ++i) row(0, i) = v[i];
  const HnfResult r = hnf_with_transform(row);
  IntMatrix kernel(n, n - 1);
  for (std::size_t c = 1; c < n; ++c)
    for (std::size_t i = 0; i < n; ++i) kernel(i, c - 1) = r.transform(i, c);
  IntMatrix basis = hnf(kernel);
  if (determinant(basis.with_column(v)) < 0) basis.negate_column(n - 2);
  return IntLattice(std::move(basis));
}

Integer gram_det(const IntLattice& lattice) { return lattice.covol_sq(); }

}  // namespace primlat
