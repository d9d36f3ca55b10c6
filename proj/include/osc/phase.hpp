// phase.hpp
//
// Real phase polynomials P(n) and the incremental evaluation of e^(2*pi*i*P(n)).
//
// Exponential sums over n = 1..N are the workhorse of every averaging test in
// this library.  Evaluating e(P(n)) term by term costs a handful of sin/cos
// per term and, worse, loses the phase to cancellation once P(n) ~ 1e16.  Two
// tools fix that:
//
//   phase_mod1      evaluates P(n) mod 1 with the reduction done exactly in
//                   integer arithmetic on the binary mantissas of the
//                   coefficients (see dyadic_mod1), so the phase is correct
//                   for any n a uint64 can hold;
//
//   PhasorStream    the finite-difference phasor chain.  For deg P = m it
//                   keeps m+1 running phasors z_j = e(Delta^j P(n)); a step is
//                   m complex multiplications and no trigonometry.  Rounding
//                   drift accumulates slowly (~1e-16 per step), so the chain
//                   is resynchronized from phase_mod1 every `resync_every`
//                   steps; the default 4096 keeps the worst-case drift below
//                   1e-11 between anchors.
//
// The chain supports a stride, which is what the arithmetic-progression tests
// use: differences are taken at step k, i.e. Delta_k P(n) = P(n+k) - P(n).

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "osc/numeric.hpp"

namespace osc {

struct PhasePolynomial {
  // a[j] multiplies n^j; constant term first.
  std::vector<double> a;

  PhasePolynomial() = default;
  explicit PhasePolynomial(std::vector<double> coeffs) : a(std::move(coeffs)) {}

  // Highest index with a nonzero coefficient, -1 for the zero polynomial.
  int degree() const;

  // Semicolon-joined coefficient list, constant term first.
  std::string describe() const;
};

// exp(2*pi*i*t); t is wrapped into [0,1) first.
std::complex<double> e2pi(double t);

// P(n) mod 1 in [0,1).  Each term a_j * n^j is reduced exactly via
// dyadic_mod1; the per-term fractional parts are then summed in double and
// wrapped once more.  Deterministic for fixed inputs.
double phase_mod1(const PhasePolynomial& p, std::uint64_t n);

// sum_j theta_j * C(n, j) mod 1, same exact-reduction scheme.  Used by the
// quasi-eigenfunction checks where phases live on the binomial basis.
double binom_phase_mod1(const std::vector<double>& thetas, std::uint64_t n);

// Recommended resync interval for PhasorStream.  Between resyncs the phase
// error of the chain grows like C(steps, deg) * machine-eps, so high degrees
// need short intervals; these values keep the measured worst per-term drift
// below 8e-12 at every degree.
std::uint64_t phasor_resync_interval(int degree);

class PhasorStream {
 public:
  // Starts at n = n0; advance() moves n by `stride`.
  PhasorStream(PhasePolynomial p, std::uint64_t n0, std::uint64_t stride = 1,
               std::uint64_t resync_every = 4096);

  std::complex<double> current() const { return z_.front(); }
  std::uint64_t n() const { return n_; }
  void advance();

 private:
  void resync();

  PhasePolynomial p_;
  std::uint64_t n_;
  std::uint64_t stride_;
  std::uint64_t resync_every_;
  std::uint64_t steps_since_resync_ = 0;
  // z_[j] = e(Delta_stride^j P(n)); z_ has deg+1 entries (one entry when P = 0).
  std::vector<std::complex<double>> z_;
};

}  // namespace osc
