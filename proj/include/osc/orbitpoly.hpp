// orbitpoly.hpp
//
// Exact symbolic orbit expansion for the polynomial skew products.
//
// For a skew product with rational parameters the lifted orbit coordinate
// x_i^n is a polynomial P_i(n) with rational coefficients.  The expansion
// follows the structural recursion directly: the increment of coordinate i at
// step l is a polynomial Q(l) built from the already-expanded lower
// coordinates, and
//
//     x_i^n = x_i + sum_{l=0}^{n-1} Q(l) = x_i + sum_m Q_m * F_m(n)
//
// where F_m(n) = sum_{l=0}^{n-1} l^m is the Faulhaber polynomial of degree
// m+1.  No general symbolic summation is involved; everything reduces to
// exact rational polynomial arithmetic plus F_m.
//
// Degree discipline: deg P_i <= i + k - 1 for the simple family.  That bound
// follows from the recursion (each step adds one sum over a polynomial whose
// degree is capped by max(deg P_{i-1}, k)), so it is asserted after each
// expansion; a violation is a defect, not an input error.
//
// For the general family the expansion records k^(i-1) + 1 as the reference
// estimate per coordinate.  The estimate is sharp when coordinates x_2, ...,
// x_{i-1} enter h_i at most linearly (at k = 2 it is attained by x_1 x_2 and
// x_2 x_3), but it is NOT universal: squaring a coordinate whose orbit
// polynomial has degree D yields degree 2D + 1 after summation, e.g.
// h_2 = x_1^2, h_3 = x_2^2 gives deg P_3 = 7 > 2^2 + 1.  The expansion is
// exact either way, so degree_attained is reported next to degree_bound and
// callers decide what to make of an overshoot.
//
// F_m is generated through the Stirling decomposition
// sum_{l<n} l^m = sum_{t<=m} S2(m,t) * t! * C(n, t+1), which keeps every
// intermediate value an exact rational.

#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "osc/numeric.hpp"
#include "osc/phase.hpp"
#include "osc/torus.hpp"

namespace osc::orbitpoly {

// ===========================================================================
// dense exact polynomials in one variable
// ===========================================================================

class RationalPoly {
 public:
  // degree() of the zero polynomial; stands in for "minus infinity"
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
  static RationalPoly constant(const Rat& v);
  static RationalPoly monomial(const Rat& coeff, std::size_t degree);

  int degree() const { return c_.empty() ? kZeroDegree : static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rat>& coeffs() const { return c_; }
  Rat coeff(std::size_t j) const { return j < c_.size() ? c_[j] : Rat(0); }

  Rat eval(const Rat& x) const;
  Rat eval_u64(std::uint64_t n) const;

  RationalPoly operator+(const RationalPoly& o) const;
  RationalPoly operator-(const RationalPoly& o) const;
  RationalPoly operator*(const RationalPoly& o) const;
  RationalPoly scaled(const Rat& s) const;
  // this(inner(x)), exact
  RationalPoly compose(const RationalPoly& inner) const;
  bool operator==(const RationalPoly& o) const { return c_ == o.c_; }

  // Semicolon-joined `p/q` coefficients, constant term first; "0" when zero.
  std::string describe() const;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rat> c_;  // c_[j] multiplies n^j, trailing zeros trimmed
};

// F_j(n) = sum_{l=0}^{n-1} l^j (convention 0^0 = 1, so F_0(n) = n).
// Degree exactly j+1, leading coefficient 1/(j+1).
RationalPoly faulhaber(unsigned j);

// C(n, j) as a polynomial in n of degree j.
RationalPoly binomial_poly(unsigned j);

// ===========================================================================
// orbit expansion
// ===========================================================================

struct OrbitExpansion {
  std::vector<RationalPoly> coord;  // coord[i] is P_{i+1}(n), i.e. 0-based
  // Reference estimate per coordinate: i+k-1 (simple, guaranteed) or
  // k^(i-1)+1 (general, can be exceeded; see the file comment).
  std::vector<int> degree_bound;
  std::vector<int> degree_attained; // RationalPoly degree, kZeroDegree if zero
  int m = 1;                        // max(1, attained degrees of coords 2..d)
};

// P_i(n) = i-th lifted coordinate of f^n(x0) for all n >= 0.
OrbitExpansion expand_orbit_simple(const torus::SimplePolySkew<Rat>& flow,
                                   const std::vector<Rat>& x0_lift);
OrbitExpansion expand_orbit_general(const torus::GeneralPolySkew<Rat>& flow,
                                    const std::vector<Rat>& x0_lift);

// ===========================================================================
// phases along an orbit
// ===========================================================================

// p(f^n x) = constant + sum_w amplitude_w * e(2 pi i wave_w(n)): each
// character k of p contributes the phase polynomial <k, P(n)>.  The trivial
// character is reported separately as `constant`.
struct ComposedPhase {
  std::complex<double> constant{0.0, 0.0};
  std::vector<std::pair<std::complex<double>, RationalPoly>> waves;
};

ComposedPhase compose_phase(const torus::TrigPolynomial& p,
                            const std::vector<RationalPoly>& coord);
std::complex<double> composed_phase_eval(const ComposedPhase& cp, std::uint64_t n);

// ===========================================================================
// binomial-coefficient phases
// ===========================================================================

struct BinomialPhase {
  std::vector<double> thetas;  // thetas[j] multiplies C(n, j)
};

// sum_j theta_j C(n,j) as a monomial-basis polynomial; exact for rational
// theta, rounded once per coefficient for the double variant.
RationalPoly binomial_to_monomial_exact(const std::vector<Rat>& thetas);
PhasePolynomial binomial_to_monomial(const BinomialPhase& b);

// P(n) mod 1 as an exact rational in [0, 1).
Rat eval_phase_mod1(const RationalPoly& p, std::uint64_t n);

// Lossy conversion for feeding exact expansions into the double machinery.
PhasePolynomial to_phase_poly(const RationalPoly& p);

}  // namespace osc::orbitpoly
