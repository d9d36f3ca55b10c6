#include "osc/orbitpoly.hpp"

#include <stdexcept>

namespace osc::orbitpoly {

// ===========================================================================
// RationalPoly
// ===========================================================================

RationalPoly RationalPoly::constant(const Rat& v) {
  return RationalPoly(std::vector<Rat>{v});
}

RationalPoly RationalPoly::monomial(const Rat& coeff, std::size_t degree) {
  std::vector<Rat> c(degree + 1, Rat(0));
  c[degree] = coeff;
  return RationalPoly(std::move(c));
}

Rat RationalPoly::eval(const Rat& x) const {
  Rat acc(0);
  for (std::size_t j = c_.size(); j-- > 0;) acc = acc * x + c_[j];
  return acc;
}

Rat RationalPoly::eval_u64(std::uint64_t n) const {
  Int nz;
  mpz_set_ui(nz.get_mpz_t(), n);
  return eval(Rat(nz));
}

RationalPoly RationalPoly::operator+(const RationalPoly& o) const {
  std::vector<Rat> out(std::max(c_.size(), o.c_.size()), Rat(0));
  for (std::size_t j = 0; j < c_.size(); ++j) out[j] += c_[j];
  for (std::size_t j = 0; j < o.c_.size(); ++j) out[j] += o.c_[j];
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::operator-(const RationalPoly& o) const {
  std::vector<Rat> out(std::max(c_.size(), o.c_.size()), Rat(0));
  for (std::size_t j = 0; j < c_.size(); ++j) out[j] += c_[j];
  for (std::size_t j = 0; j < o.c_.size(); ++j) out[j] -= o.c_[j];
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::operator*(const RationalPoly& o) const {
  if (c_.empty() || o.c_.empty()) return RationalPoly();
  std::vector<Rat> out(c_.size() + o.c_.size() - 1, Rat(0));
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) out[i + j] += c_[i] * o.c_[j];
  }
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::scaled(const Rat& s) const {
  if (s == 0) return RationalPoly();
  std::vector<Rat> out = c_;
  for (auto& v : out) v *= s;
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::compose(const RationalPoly& inner) const {
  RationalPoly acc;
  for (std::size_t j = c_.size(); j-- > 0;) {
    acc = acc * inner;
    acc = acc + RationalPoly::constant(c_[j]);
  }
  return acc;
}

std::string RationalPoly::describe() const {
  if (c_.empty()) return "0";
  std::string out;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (j) out += ';';
    out += rat_to_string(c_[j]);
  }
  return out;
}

// ===========================================================================
// Faulhaber via Stirling numbers
// ===========================================================================

RationalPoly binomial_poly(unsigned j) {
  // product_{t<j} (n - t) / j!
  RationalPoly p = RationalPoly::constant(Rat(1));
  for (unsigned t = 0; t < j; ++t)
    p = p * RationalPoly(std::vector<Rat>{Rat(-static_cast<long>(t)), Rat(1)});
  Rat inv_fact(1, factorial_int(j));
  inv_fact.canonicalize();
  return p.scaled(inv_fact);
}

RationalPoly faulhaber(unsigned j) {
  // S2 table: S2(m, t) = t*S2(m-1, t) + S2(m-1, t-1)
  std::vector<std::vector<Int>> s2(j + 1, std::vector<Int>(j + 1, Int(0)));
  s2[0][0] = 1;
  for (unsigned m = 1; m <= j; ++m)
    for (unsigned t = 1; t <= m; ++t)
      s2[m][t] = Int(t) * s2[m - 1][t] + s2[m - 1][t - 1];

  // sum_{l<n} l^j = sum_t S2(j,t) t! C(n, t+1); the j=0 case is C(n,1) = n
  RationalPoly acc;
  for (unsigned t = (j == 0 ? 0 : 1); t <= j; ++t) {
    if (j > 0 && s2[j][t] == 0) continue;
    Rat w(s2[j][t] * factorial_int(t));
    acc = acc + binomial_poly(t + 1).scaled(w);
  }
  return acc;
}

// ===========================================================================
// orbit expansion
// ===========================================================================

namespace {

// sum over l of the increment polynomial: sum_m Q_m F_m(n)
RationalPoly summed(const RationalPoly& q) {
  RationalPoly acc;
  const auto& c = q.coeffs();
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (c[m] == 0) continue;
    acc = acc + faulhaber(static_cast<unsigned>(m)).scaled(c[m]);
  }
  return acc;
}

int attained(const RationalPoly& p) { return p.degree(); }

void finish(OrbitExpansion& out, int d) {
  out.degree_attained.clear();
  for (const auto& p : out.coord) out.degree_attained.push_back(attained(p));
  out.m = 1;
  for (int i = 1; i < d; ++i) {
    int a = out.degree_attained[static_cast<std::size_t>(i)];
    if (a != RationalPoly::kZeroDegree && a > out.m) out.m = a;
  }
}

}  // namespace

OrbitExpansion expand_orbit_simple(const torus::SimplePolySkew<Rat>& flow,
                                   const std::vector<Rat>& x0_lift) {
  torus::Flow<Rat> wrapped = flow;
  torus::validate_flow(wrapped);
  const int d = flow.d;
  if (static_cast<int>(x0_lift.size()) != d)
    throw ConfigError("expand_orbit_simple: start point has wrong dimension");

  OrbitExpansion out;
  out.coord.reserve(static_cast<std::size_t>(d));
  out.degree_bound.assign(static_cast<std::size_t>(d), 0);

  // P_1(n) = x_1 + a n
  out.coord.push_back(RationalPoly(std::vector<Rat>{x0_lift[0], flow.a}));
  out.degree_bound[0] = 1;

  for (int i = 2; i <= d; ++i) {
    // increment polynomial Q(l) = sum_j b_ij P_j(l) + h_i(P_1(l))
    RationalPoly q;
    for (int j = 2; j <= i - 1; ++j) {
      const Rat& bij = flow.b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (bij != 0) q = q + out.coord[static_cast<std::size_t>(j - 1)].scaled(bij);
    }
    const auto& hi = flow.h[static_cast<std::size_t>(i)];
    if (!hi.c.empty()) {
      RationalPoly h_poly{std::vector<Rat>(hi.c)};
      q = q + h_poly.compose(out.coord[0]);
    }
    RationalPoly pi = RationalPoly::constant(x0_lift[static_cast<std::size_t>(i - 1)]) + summed(q);
    int bound = i + flow.k - 1;
    if (pi.degree() != RationalPoly::kZeroDegree && pi.degree() > bound)
      throw std::logic_error("expand_orbit_simple: degree bound i+k-1 violated");
    out.coord.push_back(std::move(pi));
    out.degree_bound[static_cast<std::size_t>(i - 1)] = bound;
  }

  finish(out, d);
  return out;
}

OrbitExpansion expand_orbit_general(const torus::GeneralPolySkew<Rat>& flow,
                                    const std::vector<Rat>& x0_lift) {
  torus::Flow<Rat> wrapped = flow;
  torus::validate_flow(wrapped);
  const int d = flow.d;
  if (static_cast<int>(x0_lift.size()) != d)
    throw ConfigError("expand_orbit_general: start point has wrong dimension");

  OrbitExpansion out;
  out.coord.reserve(static_cast<std::size_t>(d));
  out.degree_bound.assign(static_cast<std::size_t>(d), 0);
  out.coord.push_back(RationalPoly(std::vector<Rat>{x0_lift[0], flow.a}));
  out.degree_bound[0] = 1;

  for (int i = 2; i <= d; ++i) {
    // Q(l) = h_i(P_1(l), ..., P_{i-1}(l)): evaluate term by term, with
    // polynomial powers cached per variable
    const auto& hi = flow.h[static_cast<std::size_t>(i)];
    std::vector<std::vector<RationalPoly>> powers(static_cast<std::size_t>(i - 1));
    auto power_of = [&](std::size_t var, unsigned e) -> const RationalPoly& {
      auto& cache = powers[var];
      if (cache.empty()) cache.push_back(RationalPoly::constant(Rat(1)));
      while (cache.size() <= e) cache.push_back(cache.back() * out.coord[var]);
      return cache[e];
    };
    RationalPoly q;
    for (const auto& term : hi.terms) {
      if (term.coeff == 0) continue;
      RationalPoly t = RationalPoly::constant(term.coeff);
      for (std::size_t var = 0; var < term.e.size(); ++var)
        if (term.e[var] > 0) t = t * power_of(var, term.e[var]);
      q = q + t;
    }

    RationalPoly pi = RationalPoly::constant(x0_lift[static_cast<std::size_t>(i - 1)]) + summed(q);
    // Reference estimate only; nonlinear coupling of higher coordinates can
    // exceed it, so the overshoot is reported, not treated as a defect.
    long bound = 1;
    for (int t = 1; t < i; ++t) bound *= flow.k;  // k^(i-1)
    bound += 1;
    out.coord.push_back(std::move(pi));
    out.degree_bound[static_cast<std::size_t>(i - 1)] = static_cast<int>(bound);
  }

  finish(out, d);
  return out;
}

// ===========================================================================
// composed phases
// ===========================================================================

ComposedPhase compose_phase(const torus::TrigPolynomial& p,
                            const std::vector<RationalPoly>& coord) {
  ComposedPhase out;
  for (const auto& [k, amp] : p.terms) {
    if (k.size() != coord.size())
      throw ConfigError("compose_phase: character dimension mismatch");
    bool trivial = true;
    RationalPoly phase;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] == 0) continue;
      trivial = false;
      phase = phase + coord[i].scaled(Rat(k[i]));
    }
    if (trivial)
      out.constant += amp;
    else
      out.waves.emplace_back(amp, std::move(phase));
  }
  return out;
}

std::complex<double> composed_phase_eval(const ComposedPhase& cp, std::uint64_t n) {
  std::complex<double> acc = cp.constant;
  for (const auto& [amp, phase] : cp.waves)
    acc += amp * e2pi(to_double(eval_phase_mod1(phase, n)));
  return acc;
}

// ===========================================================================
// binomial phases
// ===========================================================================

RationalPoly binomial_to_monomial_exact(const std::vector<Rat>& thetas) {
  RationalPoly acc;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    if (thetas[j] == 0) continue;
    acc = acc + binomial_poly(static_cast<unsigned>(j)).scaled(thetas[j]);
  }
  return acc;
}

PhasePolynomial binomial_to_monomial(const BinomialPhase& b) {
  std::vector<double> out;
  for (std::size_t j = 0; j < b.thetas.size(); ++j) {
    if (b.thetas[j] == 0.0) continue;
    const RationalPoly poly = binomial_poly(static_cast<unsigned>(j));
    const auto& bp = poly.coeffs();
    if (bp.size() > out.size()) out.resize(bp.size(), 0.0);
    for (std::size_t t = 0; t < bp.size(); ++t) out[t] += b.thetas[j] * to_double(bp[t]);
  }
  return PhasePolynomial(std::move(out));
}

Rat eval_phase_mod1(const RationalPoly& p, std::uint64_t n) {
  return mod1(p.eval_u64(n));
}

PhasePolynomial to_phase_poly(const RationalPoly& p) {
  std::vector<double> out;
  out.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) out.push_back(to_double(c));
  return PhasePolynomial(std::move(out));
}

}  // namespace osc::orbitpoly
