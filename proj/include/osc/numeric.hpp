// numeric.hpp
//
// Shared arithmetic layer for the osc-lab library.
//
//   Int / Rat      exact integers and rationals (GMP class wrappers)
//   BigFloat       RAII wrapper around an mpfr_t with explicit precision
//   dyadic_mod1    exact frac(a * k) for a double times a big integer;
//                  the reduction mod 1 happens in integer arithmetic on the
//                  binary mantissa, only the final value is rounded once
//   KahanSum       compensated accumulation for long Cesaro sums
//   ScalarOps<S>   the small trait that lets the torus flows run over either
//                  exact rationals or high-precision floats
//
// Everything here is deterministic: no global state, no hidden precision
// changes, rounding is MPFR_RNDN throughout.

#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace osc {

using Int = mpz_class;
using Rat = mpq_class;

// ===========================================================================
// errors
// ===========================================================================

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Thrown when a requested computation would need more mantissa bits than the
// configured ceiling.  Carries both numbers so callers can report or skip.
struct PrecisionBudgetError : std::runtime_error {
  long required_bits;
  long ceiling_bits;
  PrecisionBudgetError(long need, long ceiling)
      : std::runtime_error("precision budget exceeded: need " +
                           std::to_string(need) + " bits, ceiling " +
                           std::to_string(ceiling)),
        required_bits(need),
        ceiling_bits(ceiling) {}
};

// Thrown when the doubled-precision shadow stream disagrees with the primary
// stream beyond tolerance.  Indicates a precision-policy defect, not user error.
struct CertificationError : std::runtime_error {
  explicit CertificationError(const std::string& m) : std::runtime_error(m) {}
};

// ===========================================================================
// exact rational helpers
// ===========================================================================

// Parses "p/q", "-12", "3.25", "1.2e-3".  Decimal strings are converted
// exactly (denominator a power of ten).  Throws ParseError on anything else.
Rat parse_rational(const std::string& s);

// Exact conversion of a finite double (denominator a power of two).
Rat rat_from_double(double x);

// "p/q", or just "p" when the denominator is one.
std::string rat_to_string(const Rat& r);

Int floor_rat(const Rat& r);

// r - floor(r), in [0, 1).
Rat mod1(const Rat& r);

double to_double(const Rat& r);

Int int_pow(const Int& base, unsigned long e);
Rat rat_pow(const Rat& base, unsigned long e);
Int binomial_int(unsigned long n, unsigned long k);
Int factorial_int(unsigned long n);

// ===========================================================================
// BigFloat: explicit-precision MPFR value
// ===========================================================================
//
// Precision is fixed at construction.  Binary operators allocate the result
// at the larger operand precision; compound assignments round into the
// left operand's precision.  All rounding is to nearest.

class BigFloat {
 public:
  BigFloat() { mpfr_init2(v_, 64); mpfr_set_zero(v_, 1); }
  explicit BigFloat(long prec) {
    mpfr_init2(v_, prec < 2 ? 2 : prec);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, 2);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  long prec() const { return mpfr_get_prec(v_); }

  static BigFloat from_rat(const Rat& r, long prec);
  static BigFloat from_double(double x, long prec);
  static BigFloat from_int(const Int& z, long prec);
  // Base-10 string, same grammar MPFR accepts.
  static BigFloat from_decimal(const std::string& s, long prec);
  static BigFloat sqrt_ui(unsigned long x, long prec);

  // this rounded into a copy with the given precision.
  BigFloat round_to(long prec) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // Decimal string with the given number of significant digits.
  std::string to_decimal(std::size_t digits) const;

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }

  BigFloat& operator+=(const BigFloat& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator-=(const BigFloat& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator*=(const BigFloat& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  BigFloat& operator/=(const BigFloat& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) { return binop(a, b, mpfr_add); }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) { return binop(a, b, mpfr_sub); }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) { return binop(a, b, mpfr_mul); }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) { return binop(a, b, mpfr_div); }
  BigFloat operator-() const {
    BigFloat r(prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

  BigFloat mul_int(const Int& z) const {
    BigFloat r(prec());
    mpfr_mul_z(r.v_, v_, z.get_mpz_t(), MPFR_RNDN);
    return r;
  }

  // x - floor(x), exact when the integer part fits the mantissa (which the
  // precision policies in this library guarantee).  Result in [0, 1).
  BigFloat frac01() const;

  // |a - b| measured on the circle R/Z, as a double.  Both inputs are
  // expected to lie in [0, 1).
  static double circle_dist(const BigFloat& a, const BigFloat& b);

  // base^e at the given precision (used for re-derivation checkpoints).
  static BigFloat pow_ui(const BigFloat& base, unsigned long e, long prec);

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  using TernFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  static BigFloat binop(const BigFloat& a, const BigFloat& b, TernFn fn) {
    BigFloat r(std::max(a.prec(), b.prec()));
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  mpfr_t v_;
};

inline BigFloat mod1(const BigFloat& x) { return x.frac01(); }
inline double to_double(const BigFloat& x) { return x.to_double(); }

// ===========================================================================
// scalar trait for templated torus code
// ===========================================================================

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Rat> {
  static Rat from_rat(const Rat& r, long /*prec*/) { return r; }
  static Rat zero_like(const Rat&) { return Rat(0); }
  static Rat mul_int(const Rat& x, const Int& z) { return x * Rat(z); }
};

template <>
struct ScalarOps<BigFloat> {
  static BigFloat from_rat(const Rat& r, long prec) { return BigFloat::from_rat(r, prec); }
  static BigFloat zero_like(const BigFloat& x) { return BigFloat(x.prec()); }
  static BigFloat mul_int(const BigFloat& x, const Int& z) { return x.mul_int(z); }
};

// ===========================================================================
// exact dyadic phase reduction
// ===========================================================================

// frac(a * k) for a finite double a and a nonnegative big integer k.
// Writes a = m * 2^e exactly (53-bit integer m), reduces m*k mod 2^-e in
// integer arithmetic, converts the remainder once.  The returned double is
// the exactly reduced value up to one final rounding.
double dyadic_mod1(double a, const Int& k);

// ===========================================================================
// compensated accumulation
// ===========================================================================

struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

struct KahanComplexSum {
  KahanSum re, im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

// ===========================================================================
// deterministic uniform doubles
// ===========================================================================

// Top 53 bits of the engine output, scaled by 2^-53.  Dyadic rationals, so
// runs agree bit for bit across platforms.
inline double rng_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace osc
