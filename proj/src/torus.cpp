#include "osc/torus.hpp"

#include <cmath>
#include <cstdlib>

namespace osc::torus {

// ===========================================================================
// IMat basics
// ===========================================================================

IMat IMat::identity(int d) {
  IMat m(d, d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

IMat IMat::operator*(const IMat& o) const {
  if (cols_ != o.rows_) throw ConfigError("IMat: size mismatch in product");
  IMat r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Int& aik = at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r.at(i, j) += aik * o.at(k, j);
    }
  return r;
}

IMat IMat::operator-(const IMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ConfigError("IMat: size mismatch in difference");
  IMat r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

bool IMat::operator==(const IMat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

bool IMat::is_zero() const {
  for (const auto& v : a_)
    if (v != 0) return false;
  return true;
}

bool IMat::is_identity() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

IMat IMat::transpose() const {
  IMat r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

IMat IMat::pow(unsigned long e) const {
  if (rows_ != cols_) throw ConfigError("IMat: pow needs a square matrix");
  IMat result = identity(rows_);
  IMat base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

Int IMat::det() const {
  if (rows_ != cols_) throw ConfigError("IMat: det needs a square matrix");
  const int n = rows_;
  if (n == 0) return 1;
  IMat a = *this;  // Bareiss fraction-free elimination
  int sign = 1;
  Int prev(1);
  for (int k = 0; k + 1 < n; ++k) {
    if (a.at(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (a.at(i, k) != 0) { piv = i; break; }
      if (piv < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        mpz_divexact(a.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = a.at(k, k);
  }
  return sign > 0 ? a.at(n - 1, n - 1) : -a.at(n - 1, n - 1);
}

IMat IMat::inverse_unimodular() const {
  if (rows_ != cols_) throw ConfigError("IMat: inverse needs a square matrix");
  const int n = rows_;
  Int d = det();
  if (d != 1 && d != -1) throw ConfigError("IMat: inverse requires |det| = 1");
  // adjugate via cofactors; n stays small here (torus dimensions)
  IMat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      IMat minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;  // adj[i][j] = (-1)^(i+j) * minor(j, i)
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor.at(rr, cc) = at(r, c);
          ++cc;
        }
        ++rr;
      }
      Int m = minor.det();
      if ((i + j) & 1) m = -m;
      inv.at(i, j) = d == 1 ? m : -m;
    }
  return inv;
}

std::string IMat::describe() const {
  std::string s = "[";
  for (int i = 0; i < rows_; ++i) {
    s += i ? ",[" : "[";
    for (int j = 0; j < cols_; ++j) {
      if (j) s += ",";
      s += at(i, j).get_str();
    }
    s += "]";
  }
  s += "]";
  return s;
}

// ===========================================================================
// column echelon with transformation
// ===========================================================================

namespace {

void swap_cols(IMat& m, int a, int b) {
  if (a == b) return;
  for (int i = 0; i < m.rows(); ++i) std::swap(m.at(i, a), m.at(i, b));
}

void negate_col(IMat& m, int c) {
  for (int i = 0; i < m.rows(); ++i) m.at(i, c) = -m.at(i, c);
}

// col_j -= q * col_p
void submul_col(IMat& m, int j, const Int& q, int p) {
  if (q == 0) return;
  for (int i = 0; i < m.rows(); ++i) m.at(i, j) -= q * m.at(i, p);
}

}  // namespace

ColEchelon col_echelon(const IMat& m) {
  ColEchelon e{m, IMat::identity(m.cols()), 0, {}};
  IMat& h = e.h;
  IMat& u = e.u;
  const int rows = m.rows(), cols = m.cols();
  int p = 0;  // next pivot column slot
  for (int r = 0; r < rows && p < cols; ++r) {
    // reduce row r across columns p..cols-1 until at most one nonzero remains
    for (;;) {
      int best = -1;
      int count = 0;
      for (int c = p; c < cols; ++c) {
        if (h.at(r, c) == 0) continue;
        ++count;
        if (best < 0) {
          best = c;
        } else {
          Int ab, bb;
          mpz_abs(ab.get_mpz_t(), h.at(r, c).get_mpz_t());
          mpz_abs(bb.get_mpz_t(), h.at(r, best).get_mpz_t());
          if (ab < bb) best = c;  // smallest |value|, ties keep lowest index
        }
      }
      if (count == 0) { best = -1; break; }
      swap_cols(h, p, best);
      swap_cols(u, p, best);
      if (count == 1) break;
      for (int c = p + 1; c < cols; ++c) {
        if (h.at(r, c) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), h.at(r, c).get_mpz_t(), h.at(r, p).get_mpz_t());
        submul_col(h, c, q, p);
        submul_col(u, c, q, p);
      }
    }
    if (h.at(r, p) == 0) continue;  // row r vanished on the remaining columns
    if (h.at(r, p) < 0) {
      negate_col(h, p);
      negate_col(u, p);
    }
    e.pivot_rows.push_back(r);
    ++p;
  }
  e.rank = p;
  return e;
}

IMat kernel_basis(const IMat& m) {
  ColEchelon e = col_echelon(m);
  const int cols = m.cols();
  const int nk = cols - e.rank;
  IMat k(cols, nk);
  for (int j = 0; j < nk; ++j)
    for (int i = 0; i < cols; ++i) k.at(i, j) = e.u.at(i, e.rank + j);
  return k;
}

std::optional<std::vector<Int>> solve_integer(const IMat& m, const std::vector<Int>& b) {
  if (static_cast<int>(b.size()) != m.rows()) throw ConfigError("solve_integer: size mismatch");
  ColEchelon e = col_echelon(m);
  if (e.rank != m.cols()) throw ConfigError("solve_integer: matrix lacks full column rank");
  std::vector<Int> res = b;
  std::vector<Int> z(static_cast<std::size_t>(m.cols()));
  for (int t = 0; t < e.rank; ++t) {
    int rt = e.pivot_rows[static_cast<std::size_t>(t)];
    const Int& piv = e.h.at(rt, t);
    Int q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), res[static_cast<std::size_t>(rt)].get_mpz_t(),
                piv.get_mpz_t());
    if (rem != 0) return std::nullopt;
    z[static_cast<std::size_t>(t)] = q;
    for (int i = 0; i < m.rows(); ++i) res[static_cast<std::size_t>(i)] -= q * e.h.at(i, t);
  }
  for (const auto& v : res)
    if (v != 0) return std::nullopt;
  // m * u = h, so y = u * z solves m y = b
  std::vector<Int> y(static_cast<std::size_t>(m.cols()));
  for (int i = 0; i < m.cols(); ++i) {
    Int acc(0);
    for (int t = 0; t < m.cols(); ++t) acc += e.u.at(i, t) * z[static_cast<std::size_t>(t)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

IMat complete_unimodular(const IMat& x) {
  const int d = x.rows(), r = x.cols();
  if (r == 0) return IMat::identity(d);
  if (r > d) throw ConfigError("complete_unimodular: more columns than rows");
  // Echelonize x^T: x^T u = [l 0]; primitivity of the columns of x is
  // equivalent to |det l| = 1, and then x = u^-T [l^T; 0].
  ColEchelon e = col_echelon(x.transpose());
  if (e.rank != r) throw ConfigError("complete_unimodular: columns not independent");
  IMat l(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) l.at(i, j) = e.h.at(i, j);
  Int dl = l.det();
  if (dl != 1 && dl != -1)
    throw ConfigError("complete_unimodular: columns are not primitive");
  IMat w = e.u.inverse_unimodular().transpose();  // d x d unimodular
  IMat block = IMat::identity(d);                 // [[l^T, 0], [0, I]]
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) block.at(i, j) = l.at(j, i);
  for (int i = r; i < d; ++i)
    for (int j = 0; j < r; ++j) block.at(i, j) = 0;
  IMat result = w * block;
  // first r columns must reproduce x exactly
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j)
      if (result.at(i, j) != x.at(i, j))
        throw ConfigError("complete_unimodular: internal reconstruction failure");
  return result;
}

// ===========================================================================
// unipotent structure
// ===========================================================================

bool is_unipotent(const IMat& a) {
  if (a.rows() != a.cols()) return false;
  IMat n = a - IMat::identity(a.rows());
  return n.pow(static_cast<unsigned long>(a.rows())).is_zero();
}

int nilpotency_index(const IMat& a) {
  if (!is_unipotent(a)) throw ConfigError("nilpotency_index: matrix is not unipotent");
  IMat n = a - IMat::identity(a.rows());
  IMat p = IMat::identity(a.rows());
  for (int s = 1; s <= a.rows(); ++s) {
    p = p * n;
    if (p.is_zero()) return s;
  }
  throw ConfigError("nilpotency_index: unreachable");
}

IMat unipotent_triangularize(const IMat& a) {
  if (a.rows() != a.cols()) throw ConfigError("unipotent_triangularize: matrix not square");
  if (!is_unipotent(a)) throw ConfigError("unipotent_triangularize: matrix is not unipotent");
  const int d = a.rows();
  IMat n = a - IMat::identity(d);
  const int s = nilpotency_index(a);

  // adapted basis through the kernel flag ker n < ker n^2 < ... = Z^d
  IMat adapted;  // d x (growing)
  IMat npow = IMat::identity(d);
  for (int j = 1; j <= s; ++j) {
    npow = npow * n;
    IMat kj = kernel_basis(npow);  // saturated, rank grows with j
    if (j == 1) {
      adapted = kj;
      continue;
    }
    // coordinates of the current adapted columns inside kj's basis
    IMat y(kj.cols(), adapted.cols());
    for (int c = 0; c < adapted.cols(); ++c) {
      std::vector<Int> col(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) col[static_cast<std::size_t>(i)] = adapted.at(i, c);
      auto sol = solve_integer(kj, col);
      if (!sol)
        throw ConfigError("unipotent_triangularize: kernel flag inclusion failed");
      for (int i = 0; i < kj.cols(); ++i) y.at(i, c) = (*sol)[static_cast<std::size_t>(i)];
    }
    IMat u = complete_unimodular(y);
    adapted = kj * u;  // first columns reproduce the old adapted basis
  }

  if (adapted.cols() != d)
    throw ConfigError("unipotent_triangularize: flag did not exhaust Z^d");

  // Columns ordered kernel-first give a strictly *upper* triangular nilpotent
  // part; reversing the order makes it strictly lower, the advertised form.
  IMat p(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) p.at(i, j) = adapted.at(i, d - 1 - j);

  Int dp = p.det();
  if (dp != 1 && dp != -1)
    throw ConfigError("unipotent_triangularize: basis not unimodular");
  if (dp == -1) {
    // orientation fix: negating one column conjugates the result by
    // diag(-1,1,...,1), which only flips signs inside the strict lower part
    for (int i = 0; i < d; ++i) p.at(i, 0) = -p.at(i, 0);
  }

  // verify the advertised post-condition before handing p out
  IMat conj = p.inverse_unimodular() * a * p;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Int expect = (i == j) ? 1 : 0;
      if (conj.at(i, j) != expect)
        throw ConfigError("unipotent_triangularize: conjugate not lower unitriangular");
    }
  return p;
}

std::optional<int> least_unipotent_power(const IMat& a, int q_max) {
  if (a.rows() != a.cols()) throw ConfigError("least_unipotent_power: matrix not square");
  for (int q = 1; q <= q_max; ++q)
    if (is_unipotent(a.pow(static_cast<unsigned long>(q)))) return q;
  return std::nullopt;
}

// ===========================================================================
// observables
// ===========================================================================

std::string flow_type_name(int variant_index) {
  switch (variant_index) {
    case 0: return "affine";
    case 1: return "simple_skew";
    case 2: return "general_skew";
    default: return "unknown";
  }
}

std::complex<double> character_eval(const CharacterIndex& k, std::span<const double> x) {
  if (k.size() != x.size()) throw ConfigError("character_eval: dimension mismatch");
  double t = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) t += static_cast<double>(k[i]) * x[i];
  return e2pi(t);
}

std::complex<double> trigpoly_eval(const TrigPolynomial& p, std::span<const double> x) {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [k, a] : p.terms) acc += a * character_eval(k, x);
  return acc;
}

double torus_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("torus_distance: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fabs(a[i] - b[i]);
    d = d - std::floor(d);
    d = std::min(d, 1.0 - d);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace osc::torus
