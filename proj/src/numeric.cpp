#include "osc/numeric.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace osc {

// ===========================================================================
// rational parsing
// ===========================================================================

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rat parse_rational(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ParseError("empty number");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    std::string num_digits = num;
    if (!num_digits.empty() && (num_digits[0] == '+' || num_digits[0] == '-'))
      num_digits.erase(0, 1);
    if (!all_digits(num_digits) || !all_digits(den))
      throw ParseError("bad rational literal: " + raw);
    Rat r;
    if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
      throw ParseError("bad rational literal: " + raw);
    if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
      throw ParseError("zero denominator: " + raw);
    r.canonicalize();
    return r;
  }

  // sign
  int sign = 1;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    if (s[pos] == '-') sign = -1;
    ++pos;
  }

  // mantissa digits with optional dot
  std::string int_part, frac_part;
  bool seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.') {
      if (seen_dot) throw ParseError("bad number: " + raw);
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      (seen_dot ? frac_part : int_part).push_back(c);
    } else {
      break;
    }
  }
  if (int_part.empty() && frac_part.empty())
    throw ParseError("bad number: " + raw);

  long exp10 = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    std::string es = s.substr(pos);
    if (es.empty()) throw ParseError("bad exponent: " + raw);
    std::size_t epos = 0;
    if (es[0] == '+' || es[0] == '-') epos = 1;
    if (epos >= es.size() || !all_digits(es.substr(epos)))
      throw ParseError("bad exponent: " + raw);
    exp10 = std::strtol(es.c_str(), nullptr, 10);
    pos = s.size();
  }
  if (pos != s.size()) throw ParseError("bad number: " + raw);

  Int num(int_part.empty() ? "0" : int_part);
  for (char c : frac_part) {
    num *= 10;
    num += (c - '0');
  }
  Int den = int_pow(Int(10), frac_part.size());
  if (exp10 > 0)
    num *= int_pow(Int(10), static_cast<unsigned long>(exp10));
  else if (exp10 < 0)
    den *= int_pow(Int(10), static_cast<unsigned long>(-exp10));

  Rat r(num, den);
  r.canonicalize();
  if (sign < 0) r = -r;
  return r;
}

Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw ParseError("non-finite double");
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);  // exact: doubles are dyadic rationals
  return r;
}

std::string rat_to_string(const Rat& r) {
  std::string num = r.get_num().get_str();
  if (r.get_den() == 1) return num;
  return num + "/" + r.get_den().get_str();
}

Int floor_rat(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), mpq_numref(r.get_mpq_t()), mpq_denref(r.get_mpq_t()));
  return q;
}

Rat mod1(const Rat& r) { return r - Rat(floor_rat(r)); }

double to_double(const Rat& r) { return mpq_get_d(r.get_mpq_t()); }

Int int_pow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Rat rat_pow(const Rat& base, unsigned long e) {
  // num/den coprime, so their powers are too: no canonicalization needed
  return Rat(int_pow(base.get_num(), e), int_pow(base.get_den(), e));
}

Int binomial_int(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Int factorial_int(unsigned long n) {
  Int r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

// ===========================================================================
// BigFloat
// ===========================================================================

BigFloat BigFloat::from_rat(const Rat& r, long prec) {
  BigFloat b(prec);
  mpfr_set_q(b.v_, r.get_mpq_t(), MPFR_RNDN);
  return b;
}

BigFloat BigFloat::from_double(double x, long prec) {
  BigFloat b(prec);
  mpfr_set_d(b.v_, x, MPFR_RNDN);
  return b;
}

BigFloat BigFloat::from_int(const Int& z, long prec) {
  BigFloat b(prec);
  mpfr_set_z(b.v_, z.get_mpz_t(), MPFR_RNDN);
  return b;
}

BigFloat BigFloat::from_decimal(const std::string& s, long prec) {
  BigFloat b(prec);
  if (mpfr_set_str(b.v_, s.c_str(), 10, MPFR_RNDN) != 0)
    throw ParseError("bad decimal literal: " + s);
  return b;
}

BigFloat BigFloat::sqrt_ui(unsigned long x, long prec) {
  BigFloat b(prec);
  mpfr_sqrt_ui(b.v_, x, MPFR_RNDN);
  return b;
}

BigFloat BigFloat::round_to(long prec) const {
  BigFloat b(prec);
  mpfr_set(b.v_, v_, MPFR_RNDN);
  return b;
}

std::string BigFloat::to_decimal(std::size_t digits) const {
  mpfr_exp_t e;
  char* s = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
  if (!s) return "nan";
  std::string digits_str(s);
  mpfr_free_str(s);
  bool neg = !digits_str.empty() && digits_str[0] == '-';
  if (neg) digits_str.erase(0, 1);
  // mpfr_get_str semantics: value = 0.digits * 10^e
  std::string out = neg ? "-" : "";
  out += "0." + digits_str + "e" + std::to_string(static_cast<long>(e));
  return out;
}

BigFloat BigFloat::frac01() const {
  BigFloat f(prec());
  mpfr_t fl;
  mpfr_init2(fl, prec());
  mpfr_floor(fl, v_);
  mpfr_sub(f.v_, v_, fl, MPFR_RNDN);
  mpfr_clear(fl);
  // guard against rounding landing exactly on 1
  if (mpfr_cmp_ui(f.v_, 1) >= 0) mpfr_sub_ui(f.v_, f.v_, 1, MPFR_RNDN);
  if (mpfr_sgn(f.v_) < 0) mpfr_add_ui(f.v_, f.v_, 1, MPFR_RNDN);
  return f;
}

double BigFloat::circle_dist(const BigFloat& a, const BigFloat& b) {
  BigFloat d = a - b;
  double x = std::fabs(d.to_double());
  x = x - std::floor(x);  // inputs in [0,1) give x < 1 already; belt and braces
  return std::min(x, 1.0 - x);
}

BigFloat BigFloat::pow_ui(const BigFloat& base, unsigned long e, long prec) {
  BigFloat r(prec);
  mpfr_pow_ui(r.v_, base.raw(), e, MPFR_RNDN);
  return r;
}

// ===========================================================================
// dyadic_mod1
// ===========================================================================

double dyadic_mod1(double a, const Int& k) {
  if (!std::isfinite(a)) throw ParseError("non-finite coefficient");
  if (a == 0.0 || k == 0) return 0.0;
  int ex;
  double mant = std::frexp(a, &ex);  // a = mant * 2^ex, |mant| in [0.5, 1)
  // 53-bit integer mantissa: a = m * 2^(ex-53) exactly
  auto m = static_cast<long>(std::ldexp(mant, 53));
  long e = ex - 53;
  Int prod(m);
  prod *= k;
  if (e >= 0) return 0.0;  // m*k*2^e is an integer, frac vanishes
  Int rem;
  mpz_fdiv_r_2exp(rem.get_mpz_t(), prod.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  // rem in [0, 2^-e); result = rem * 2^e in [0,1), rounded once here
  double r = std::ldexp(mpz_get_d(rem.get_mpz_t()), static_cast<int>(e));
  if (r >= 1.0) r = 0.0;  // paranoia against rounding to the right endpoint
  return r;
}

}  // namespace osc
