// torus.hpp
//
// Points, maps and observables on the d-torus R^d/Z^d.
//
// Three map families are supported:
//
//   AffineMap        x |-> A x + t with A an integer matrix.  Integer A makes
//                    the map well defined on the torus, so a step reads the
//                    reduced coordinates.  (Real-coefficient affine skews are
//                    the k = 1 case of SimplePolySkew below.)
//
//   SimplePolySkew   x1 |-> x1 + a
//                    x2 |-> x2 + h_2(x1)
//                    xi |-> xi + b_{i2} x2 + ... + b_{i,i-1} x_{i-1} + h_i(x1)
//                    with real b and deg h_i <= k.
//
//   GeneralPolySkew  x1 |-> x1 + a,  xi |-> xi + h_i(x1, ..., x_{i-1}),
//                    total degree of h_i at most k.
//
// The skew families are defined through their lifts: h_i is evaluated at the
// *unreduced* coordinates of the previous step and the torus point is the
// fractional part of the running lift.  TorusPoint therefore carries the lift
// as the authoritative data; `coords` is the reduced cache.  Getting this
// wrong (reducing before feeding h_i) changes the orbit whenever the b's or
// the h coefficients are non-integer, which is the generic case here.
//
// Scalar type S is either Rat (exact) or BigFloat (high precision); the
// ScalarOps trait in numeric.hpp supplies the few operations that differ.
//
// The integer-matrix side (IMat) provides exact unimodular linear algebra:
// column echelon form with transformation, kernel lattice bases, completion
// of a primitive set of columns to a unimodular matrix, and the
// triangularization of a unipotent matrix by conjugation, i.e. P with
// det P = +1 and P^-1 A P = I + N, N strictly lower triangular.  N's kernel
// flag ker N \subset ker N^2 \subset ... is computed exactly; every kernel of
// an integer matrix is a saturated sublattice, which is what makes the
// adapted basis completable at each stage.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "osc/numeric.hpp"
#include "osc/phase.hpp"

namespace osc::torus {

// ===========================================================================
// exact integer matrices
// ===========================================================================

class IMat {
 public:
  IMat() : rows_(0), cols_(0) {}
  IMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static IMat identity(int d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Int& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Int& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  IMat operator*(const IMat& o) const;
  IMat operator-(const IMat& o) const;
  bool operator==(const IMat& o) const;
  bool is_zero() const;
  bool is_identity() const;
  IMat transpose() const;
  IMat pow(unsigned long e) const;  // square matrices only

  Int det() const;                  // fraction-free elimination, exact
  IMat inverse_unimodular() const;  // requires |det| = 1

  std::string describe() const;     // "[[1,2],[0,1]]"

 private:
  int rows_, cols_;
  std::vector<Int> a_;
};

/// Column echelon form with transformation: M * U = H, U unimodular; the
// columns of H with index >= rank are zero.  Pivot choice is deterministic:
// smallest absolute value first, ties broken by lowest column index.
struct ColEchelon {
  IMat h;
  IMat u;
  int rank;
  std::vector<int> pivot_rows;  // row of the pivot in column t, t < rank
};
ColEchelon col_echelon(const IMat& m);

// Basis of the integer kernel lattice { v : M v = 0 }, as matrix columns.
// May have zero columns count (kernel trivial); the basis is saturated.
IMat kernel_basis(const IMat& m);

// Solves M * y = b exactly over the integers; nullopt when no integer
// solution exists.  M must have full column rank.
std::optional<std::vector<Int>> solve_integer(const IMat& m, const std::vector<Int>& b);

// Extends a d x r matrix whose columns are part of some Z^d basis to a full
// d x d unimodular matrix whose first r columns are the input.  Throws
// ConfigError when the columns are not primitive.
IMat complete_unimodular(const IMat& x);

bool is_unipotent(const IMat& a);

// Smallest s >= 1 with (A - I)^s = 0 (A unipotent).
int nilpotency_index(const IMat& a);

// P with det P = +1 and P^-1 A P - I strictly lower triangular.
IMat unipotent_triangularize(const IMat& a);

// Smallest q in [1, q_max] with A^q unipotent, nullopt if none.
std::optional<int> least_unipotent_power(const IMat& a, int q_max);

// ===========================================================================
// polynomials over the scalar type
// ===========================================================================

template <class S>
struct Poly1 {
  std::vector<S> c;  // c[j] multiplies x^j

  int degree() const {
    for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) {
      S z = ScalarOps<S>::zero_like(c[static_cast<std::size_t>(j)]);
      if (!(c[static_cast<std::size_t>(j)] == z)) return j;
    }
    return -1;
  }

  S eval(const S& x) const {
    if (c.empty()) return ScalarOps<S>::zero_like(x);
    S acc = c.back();
    for (std::size_t j = c.size() - 1; j-- > 0;) acc = acc * x + c[j];
    return acc;
  }
};

template <class S>
struct MTerm {
  std::vector<unsigned> e;  // exponent per variable
  S coeff;
};

template <class S>
struct MPoly {
  std::size_t nvars = 0;
  std::vector<MTerm<S>> terms;

  unsigned total_degree() const {
    unsigned m = 0;
    for (const auto& t : terms) {
      unsigned s = 0;
      for (unsigned ei : t.e) s += ei;
      if (s > m) m = s;
    }
    return m;
  }

  S eval(std::span<const S> x) const {
    if (x.size() < nvars) throw ConfigError("MPoly: wrong argument count");
    S acc = terms.empty() ? S{} : ScalarOps<S>::zero_like(terms.front().coeff);
    for (const auto& t : terms) {
      S v = t.coeff;
      for (std::size_t i = 0; i < t.e.size(); ++i)
        for (unsigned r = 0; r < t.e[i]; ++r) v = v * x[i];
      acc = acc + v;
    }
    return acc;
  }
};

// ===========================================================================
// points and flows
// ===========================================================================

template <class S>
struct TorusPoint {
  std::vector<S> lift;    // authoritative unreduced coordinates
  std::vector<S> coords;  // mod1(lift), kept in sync by step()
};

template <class S>
TorusPoint<S> make_point(std::vector<S> lift) {
  TorusPoint<S> p;
  p.coords.reserve(lift.size());
  for (const auto& v : lift) p.coords.push_back(mod1(v));
  p.lift = std::move(lift);
  return p;
}

template <class S>
std::vector<double> coords_double(const TorusPoint<S>& p) {
  std::vector<double> out;
  out.reserve(p.coords.size());
  for (const auto& v : p.coords) out.push_back(to_double(v));
  return out;
}

template <class S>
struct AffineMap {
  IMat A;
  std::vector<S> t;
};

template <class S>
struct SimplePolySkew {
  int d = 0;
  int k = 1;
  S a{};
  // b[i][j], 1-based, meaningful for 3 <= i <= d, 2 <= j <= i-1; others zero.
  std::vector<std::vector<S>> b;
  // h[i], 1-based, meaningful for 2 <= i <= d; deg h[i] <= k.
  std::vector<Poly1<S>> h;
};

template <class S>
struct GeneralPolySkew {
  int d = 0;
  int k = 1;
  S a{};
  // h[i], 1-based, meaningful for 2 <= i <= d; h[i] takes x1..x_{i-1},
  // total degree <= k.
  std::vector<MPoly<S>> h;
};

template <class S>
using Flow = std::variant<AffineMap<S>, SimplePolySkew<S>, GeneralPolySkew<S>>;

template <class S>
int flow_dim(const Flow<S>& f) {
  if (const auto* a = std::get_if<AffineMap<S>>(&f)) return a->A.rows();
  if (const auto* s = std::get_if<SimplePolySkew<S>>(&f)) return s->d;
  return std::get<GeneralPolySkew<S>>(f).d;
}

std::string flow_type_name(int variant_index);

// Shape validation; throws ConfigError with a specific message.
template <class S>
void validate_flow(const Flow<S>& f);

// One application of the map, advancing lift and coords together.
template <class S>
void step(const Flow<S>& f, TorusPoint<S>& p);

template <class S>
class Orbit {
 public:
  Orbit(Flow<S> f, TorusPoint<S> x0) : f_(std::move(f)), x_(std::move(x0)) {
    validate_flow(f_);
    if (static_cast<int>(x_.lift.size()) != flow_dim(f_))
      throw ConfigError("orbit start point has wrong dimension");
  }

  const TorusPoint<S>& point() const { return x_; }
  std::uint64_t n() const { return n_; }
  void advance(std::uint64_t steps = 1) {
    for (std::uint64_t i = 0; i < steps; ++i) step(f_, x_);
    n_ += steps;
  }

 private:
  Flow<S> f_;
  TorusPoint<S> x_;
  std::uint64_t n_ = 0;
};

// q-fold composition of an affine map: A^q and the reduced translation
// sum_{j<q} A^j t mod 1.  The translation is reduced because the composition
// is a torus map; comparisons against q single steps must use coords.
template <class S>
AffineMap<S> power_affine(const AffineMap<S>& f, unsigned long q);

// Mantissa bits that keep the lift of `flow` exact-to-guard for n steps.
// Deliberately generous; the cost of extra bits is tiny next to the cost of
// getting this wrong.
template <class S>
long recommended_prec(const Flow<S>& f, std::uint64_t n_max, long guard = 64);

// ===========================================================================
// observables
// ===========================================================================

using CharacterIndex = std::vector<long>;

// e(2 pi i <k, x>) on reduced coordinates.
std::complex<double> character_eval(const CharacterIndex& k, std::span<const double> x);

struct TrigPolynomial {
  // finitely many characters with complex amplitudes
  std::map<CharacterIndex, std::complex<double>> terms;
};

std::complex<double> trigpoly_eval(const TrigPolynomial& p, std::span<const double> x);

// max_i of the circle distance per coordinate; inputs reduced to [0,1).
double torus_distance(std::span<const double> a, std::span<const double> b);

// ===========================================================================
// template implementations
// ===========================================================================

template <class S>
void validate_flow(const Flow<S>& f) {
  if (const auto* a = std::get_if<AffineMap<S>>(&f)) {
    if (a->A.rows() != a->A.cols()) throw ConfigError("affine map: A must be square");
    if (static_cast<int>(a->t.size()) != a->A.rows())
      throw ConfigError("affine map: translation size mismatch");
    return;
  }
  if (const auto* s = std::get_if<SimplePolySkew<S>>(&f)) {
    if (s->d < 1) throw ConfigError("simple skew: d must be >= 1");
    if (s->k < 1) throw ConfigError("simple skew: k must be >= 1");
    if (static_cast<int>(s->h.size()) != s->d + 1)
      throw ConfigError("simple skew: h must have entries 2..d");
    if (static_cast<int>(s->b.size()) != s->d + 1)
      throw ConfigError("simple skew: b must be (d+1) x (d+1), 1-based");
    for (int i = 2; i <= s->d; ++i)
      if (s->h[static_cast<std::size_t>(i)].degree() > s->k)
        throw ConfigError("simple skew: deg h_" + std::to_string(i) + " exceeds k");
    for (int i = 0; i <= s->d; ++i)
      if (static_cast<int>(s->b[static_cast<std::size_t>(i)].size()) != s->d + 1)
        throw ConfigError("simple skew: b row size mismatch");
    return;
  }
  const auto& g = std::get<GeneralPolySkew<S>>(f);
  if (g.d < 1) throw ConfigError("general skew: d must be >= 1");
  if (g.k < 1) throw ConfigError("general skew: k must be >= 1");
  if (static_cast<int>(g.h.size()) != g.d + 1)
    throw ConfigError("general skew: h must have entries 2..d");
  for (int i = 2; i <= g.d; ++i) {
    const auto& hi = g.h[static_cast<std::size_t>(i)];
    if (hi.nvars != static_cast<std::size_t>(i - 1))
      throw ConfigError("general skew: h_" + std::to_string(i) + " must take " +
                        std::to_string(i - 1) + " variables");
    if (hi.total_degree() > static_cast<unsigned>(g.k))
      throw ConfigError("general skew: total degree of h_" + std::to_string(i) + " exceeds k");
  }
}

template <class S>
void step(const Flow<S>& f, TorusPoint<S>& p) {
  const int d = flow_dim(f);
  if (static_cast<int>(p.lift.size()) != d)
    throw ConfigError("step: point dimension mismatch");

  if (const auto* am = std::get_if<AffineMap<S>>(&f)) {
    // integer matrix: act on reduced coordinates, the result is the new lift
    std::vector<S> y;
    y.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      S acc = am->t[static_cast<std::size_t>(i)];
      for (int j = 0; j < d; ++j) {
        const Int& a_ij = am->A.at(i, j);
        if (a_ij != 0)
          acc = acc + ScalarOps<S>::mul_int(p.coords[static_cast<std::size_t>(j)], a_ij);
      }
      y.push_back(std::move(acc));
    }
    p.lift = std::move(y);
  } else if (const auto* sk = std::get_if<SimplePolySkew<S>>(&f)) {
    std::vector<S> old = p.lift;  // simultaneous update: everything reads n-th step values
    p.lift[0] = old[0] + sk->a;
    for (int i = 2; i <= d; ++i) {
      S acc = old[static_cast<std::size_t>(i - 1)] + sk->h[static_cast<std::size_t>(i)].eval(old[0]);
      for (int j = 2; j <= i - 1; ++j) {
        const S& bij = sk->b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        S zero = ScalarOps<S>::zero_like(bij);
        if (!(bij == zero)) acc = acc + bij * old[static_cast<std::size_t>(j - 1)];
      }
      p.lift[static_cast<std::size_t>(i - 1)] = std::move(acc);
    }
  } else {
    const auto& g = std::get<GeneralPolySkew<S>>(f);
    std::vector<S> old = p.lift;
    p.lift[0] = old[0] + g.a;
    for (int i = 2; i <= d; ++i) {
      std::span<const S> args(old.data(), static_cast<std::size_t>(i - 1));
      p.lift[static_cast<std::size_t>(i - 1)] =
          old[static_cast<std::size_t>(i - 1)] + g.h[static_cast<std::size_t>(i)].eval(args);
    }
  }

  p.coords.resize(p.lift.size());
  for (std::size_t i = 0; i < p.lift.size(); ++i) p.coords[i] = mod1(p.lift[i]);
}

template <class S>
AffineMap<S> power_affine(const AffineMap<S>& f, unsigned long q) {
  if (q == 0) throw ConfigError("power_affine: q must be >= 1");
  const int d = f.A.rows();
  AffineMap<S> out;
  out.A = f.A.pow(q);
  std::vector<S> acc = f.t;  // sum_{j<q} A^j t, computed by v <- A v
  std::vector<S> v = f.t;
  for (unsigned long s = 1; s < q; ++s) {
    std::vector<S> w;
    w.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      S a = ScalarOps<S>::zero_like(v[0]);
      for (int j = 0; j < d; ++j) {
        const Int& a_ij = f.A.at(i, j);
        if (a_ij != 0) a = a + ScalarOps<S>::mul_int(v[static_cast<std::size_t>(j)], a_ij);
      }
      w.push_back(std::move(a));
    }
    v = std::move(w);
    for (int i = 0; i < d; ++i) acc[static_cast<std::size_t>(i)] = acc[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i)];
  }
  for (auto& x : acc) x = mod1(x);
  out.t = std::move(acc);
  return out;
}

template <class S>
long recommended_prec(const Flow<S>& f, std::uint64_t n_max, long guard) {
  long deg = 1;
  if (const auto* s = std::get_if<SimplePolySkew<S>>(&f)) {
    deg = s->d + s->k - 1;
  } else if (const auto* g = std::get_if<GeneralPolySkew<S>>(&f)) {
    deg = 1;
    long p = 1;
    for (int i = 2; i <= g->d; ++i) {
      p *= g->k;  // k^(i-1)
      deg = std::max(deg, p + 1);
    }
  }
  long logn = 1;
  while ((n_max >> logn) != 0) ++logn;
  // degree * log2(n) for the lift growth, flat allowance for coefficients
  long bits = deg * (logn + 1) + 96 + guard;
  return bits < 128 ? 128 : bits;
}

}  // namespace osc::torus
