#include "osc/averaging.hpp"

#include <algorithm>
#include <cmath>

namespace osc::averaging {

void validate_checkpoints(const std::vector<std::uint64_t>& checkpoints) {
  if (checkpoints.empty()) throw ConfigError("checkpoints must be nonempty");
  if (checkpoints.front() < 1) throw ConfigError("checkpoints must be >= 1");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] <= checkpoints[i - 1])
      throw ConfigError("checkpoints must be strictly increasing");
}

// ===========================================================================
// Weyl sums
// ===========================================================================

CesaroSeries arith_weyl_series(const seqgen::ComplexSequence& seq, const PhasePolynomial& p,
                               std::uint64_t k, std::uint64_t l,
                               const std::vector<std::uint64_t>& checkpoints) {
  if (k < 1) throw ConfigError("arith_weyl_series: k must be >= 1");
  if (l >= k) throw ConfigError("arith_weyl_series: require 0 <= l < k");
  detail::SeriesBuilder series(checkpoints);
  const std::uint64_t n_last = series.last_n();
  if (n_last > seq.length())
    throw ConfigError("arith_weyl_series: sequence shorter than final checkpoint");

  const std::uint64_t n0 = (l == 0) ? k : l;  // smallest index >= 1 in the progression
  if (n0 <= n_last) {
    auto cur = seq.cursor(n0);
    PhasorStream chain(p, n0, k, phasor_resync_interval(p.degree()));
    for (std::uint64_t n = n0;; n += k) {
      series.add(n, cur->next() * chain.current());
      if (n + k > n_last) break;
      cur->skip(k - 1);
      chain.advance();
    }
  }
  return series.finish();
}

CesaroSeries weyl_series(const seqgen::ComplexSequence& seq, const PhasePolynomial& p,
                         const std::vector<std::uint64_t>& checkpoints) {
  return arith_weyl_series(seq, p, 1, 0, checkpoints);
}

std::complex<double> weyl_average(const seqgen::ComplexSequence& seq, const PhasePolynomial& p,
                                  std::uint64_t n_max) {
  return weyl_series(seq, p, {n_max}).values.back();
}

std::complex<double> weyl_average_direct(const seqgen::ComplexSequence& seq,
                                         const PhasePolynomial& p, std::uint64_t n_max) {
  if (n_max < 1) throw ConfigError("weyl_average_direct: n_max must be >= 1");
  if (n_max > seq.length())
    throw ConfigError("weyl_average_direct: sequence shorter than n_max");
  auto cur = seq.cursor(1);
  KahanComplexSum acc;
  for (std::uint64_t n = 1; n <= n_max; ++n)
    acc.add(cur->next() * e2pi(phase_mod1(p, n)));
  return acc.value() / static_cast<double>(n_max);
}

// ===========================================================================
// sampler
// ===========================================================================

std::vector<PhasePolynomial> sample_phase_polys(int degree, const SamplerConfig& cfg) {
  if (degree < 0) throw ConfigError("sample_phase_polys: degree must be >= 0");
  const std::size_t nc = static_cast<std::size_t>(degree) + 1;
  std::vector<PhasePolynomial> out;
  std::mt19937_64 rng(cfg.seed);
  for (int s = 0; s < cfg.random_count; ++s) {
    std::vector<double> a(nc);
    for (auto& v : a) v = rng_unit(rng);
    out.emplace_back(std::move(a));
  }
  if (cfg.structured) {
    out.emplace_back(std::vector<double>(nc, 0.0));
    std::vector<double> lead(nc, 0.0);
    lead[nc - 1] = 0.5;
    out.emplace_back(std::move(lead));
    // fractional powers of the golden ratio: frac(phi^(j+1))
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<double> gold(nc);
    double pw = 1.0;
    for (std::size_t j = 0; j < nc; ++j) {
      pw *= phi;
      gold[j] = pw - std::floor(pw);
    }
    out.emplace_back(std::move(gold));
    // small prime reciprocals 1/2, 1/3, 1/5, ...
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
    std::vector<double> rat(nc);
    for (std::size_t j = 0; j < nc; ++j)
      rat[j] = 1.0 / primes[j % (sizeof primes / sizeof *primes)];
    out.emplace_back(std::move(rat));
  }
  for (const auto& p : cfg.extra) out.push_back(p);
  return out;
}

// ===========================================================================
// oscillation batteries
// ===========================================================================

namespace {

bool decayed(const CesaroSeries& s) {
  return s.magnitude.size() < 2 || s.magnitude.back() <= s.magnitude.front();
}

}  // namespace

OscillationReport oscillation_order_test(const seqgen::ComplexSequence& seq, int order,
                                         const SamplerConfig& sampler,
                                         const std::vector<std::uint64_t>& checkpoints,
                                         double threshold, int threads) {
  if (order < 1) throw ConfigError("oscillation_order_test: order must be >= 1");
  OscillationReport rep;
  rep.order = order;
  rep.threshold = threshold;
  auto polys = sample_phase_polys(order, sampler);
  for (const auto& p : polys)
    if (p.degree() > order)
      throw ConfigError("oscillation_order_test: sampled polynomial exceeds order");
  rep.rows.resize(polys.size());
  parallel_cells(polys.size(), threads, [&](std::size_t i) {
    OscillationRow row;
    row.poly = polys[i];
    row.series = weyl_series(seq, polys[i], checkpoints);
    row.pass = row.series.final_abs() < threshold;
    row.inconclusive = !decayed(row.series);
    rep.rows[i] = std::move(row);
  });
  rep.all_pass = true;
  for (const auto& r : rep.rows) {
    rep.all_pass = rep.all_pass && r.pass;
    rep.max_final = std::max(rep.max_final, r.series.final_abs());
  }
  return rep;
}

ArithReport arithmetic_oscillation_test(const seqgen::ComplexSequence& seq, int order,
                                        std::uint64_t k_max, const SamplerConfig& sampler,
                                        const std::vector<std::uint64_t>& checkpoints,
                                        double threshold, int threads) {
  if (order < 1) throw ConfigError("arithmetic_oscillation_test: order must be >= 1");
  if (k_max < 1) throw ConfigError("arithmetic_oscillation_test: k_max must be >= 1");
  ArithReport rep;
  rep.order = order;
  rep.k_max = k_max;
  rep.threshold = threshold;
  auto polys = sample_phase_polys(order, sampler);

  struct Cell {
    std::uint64_t k, l;
    std::size_t poly;
  };
  std::vector<Cell> cells;
  for (std::uint64_t k = 1; k <= k_max; ++k)
    for (std::uint64_t l = 0; l < k; ++l)
      for (std::size_t pi = 0; pi < polys.size(); ++pi) cells.push_back({k, l, pi});

  rep.rows.resize(cells.size());
  parallel_cells(cells.size(), threads, [&](std::size_t i) {
    const Cell& c = cells[i];
    ArithRow row;
    row.k = c.k;
    row.l = c.l;
    row.poly = polys[c.poly];
    row.series = arith_weyl_series(seq, polys[c.poly], c.k, c.l, checkpoints);
    row.pass = row.series.final_abs() < threshold;
    rep.rows[i] = std::move(row);
  });
  rep.all_pass = true;
  for (const auto& r : rep.rows) {
    rep.all_pass = rep.all_pass && r.pass;
    rep.max_final = std::max(rep.max_final, r.series.final_abs());
  }
  return rep;
}

// ===========================================================================
// Chowla correlations
// ===========================================================================

std::string ChowlaPattern::label() const {
  std::string s;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (i) s += '+';
    s += "l" + std::to_string(shifts[i]) + "e" + std::to_string(exponents[i]);
  }
  return s.empty() ? "empty" : s;
}

void ChowlaPattern::validate() const {
  if (shifts.empty() || shifts.size() != exponents.size())
    throw ConfigError("chowla pattern: need equally many shifts and exponents");
  for (std::size_t i = 1; i < shifts.size(); ++i)
    if (shifts[i] <= shifts[i - 1])
      throw ConfigError("chowla pattern: shifts must be strictly increasing");
  for (auto e : exponents)
    if (e < 1) throw ConfigError("chowla pattern: exponents must be >= 1");
}

namespace {

std::complex<double> ipow(std::complex<double> z, std::uint32_t e) {
  std::complex<double> r{1.0, 0.0};
  while (e) {
    if (e & 1) r *= z;
    e >>= 1;
    if (e) z *= z;
  }
  return r;
}

}  // namespace

std::vector<ChowlaRow> chowla_test(const seqgen::ComplexSequence& seq,
                                   const std::vector<ChowlaPattern>& patterns,
                                   std::uint64_t n_max, double admissibility_tol) {
  if (n_max < 1) throw ConfigError("chowla_test: n_max must be >= 1");
  std::vector<ChowlaRow> rows;
  rows.reserve(patterns.size());
  for (const auto& pat : patterns) {
    pat.validate();
    const std::size_t r = pat.shifts.size();
    if (n_max + pat.shifts.back() > seq.length())
      throw ConfigError("chowla_test: sequence shorter than n_max + max shift");

    std::vector<std::unique_ptr<seqgen::TermCursor>> curs;
    curs.reserve(r);
    for (auto l : pat.shifts) curs.push_back(seq.cursor(1 + l));

    KahanComplexSum acc;
    bool all_modulus = true;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      std::complex<double> prod{1.0, 0.0};
      bool first = true;
      for (std::size_t i = 0; i < r; ++i) {
        std::complex<double> c = curs[i]->next();
        std::complex<double> v = pat.exponents[i] == 1 ? c : ipow(c, pat.exponents[i]);
        if (all_modulus &&
            std::abs(v - std::complex<double>(std::abs(c), 0.0)) > admissibility_tol)
          all_modulus = false;
        // keep the r = 1, exponent 1 case bit-identical to the plain average
        prod = first ? v : prod * v;
        first = false;
      }
      acc.add(prod);
    }
    ChowlaRow row;
    row.pattern = pat;
    row.avg = acc.value() / static_cast<double>(n_max);
    row.excluded = all_modulus;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ChowlaPattern> enumerate_patterns(int r_max, std::uint32_t shift_max,
                                              std::uint32_t expo_max) {
  if (r_max < 1 || expo_max < 1) throw ConfigError("enumerate_patterns: bad bounds");
  std::vector<ChowlaPattern> out;

  // iterate r, then shift tuples lexicographically, then exponent tuples
  std::vector<std::uint32_t> shifts, expos;
  auto emit_expos = [&](auto&& self, std::size_t pos) -> void {
    if (pos == shifts.size()) {
      out.push_back({shifts, expos});
      return;
    }
    for (std::uint32_t e = 1; e <= expo_max; ++e) {
      expos[pos] = e;
      self(self, pos + 1);
    }
  };
  auto emit_shifts = [&](auto&& self, std::size_t pos, std::uint32_t lo, int r) -> void {
    if (pos == static_cast<std::size_t>(r)) {
      expos.assign(static_cast<std::size_t>(r), 1);
      emit_expos(emit_expos, 0);
      return;
    }
    for (std::uint32_t l = lo; l <= shift_max; ++l) {
      shifts[pos] = l;
      self(self, pos + 1, l + 1, r);
    }
  };
  for (int r = 1; r <= r_max; ++r) {
    shifts.assign(static_cast<std::size_t>(r), 0);
    emit_shifts(emit_shifts, 0, 0, r);
  }
  return out;
}

// ===========================================================================
// quasi-eigenfunction phases
// ===========================================================================

torus::AffineMap<Rat> chain_flow(int d, const Rat& alpha) {
  if (d < 1) throw ConfigError("chain_flow: d must be >= 1");
  torus::AffineMap<Rat> f;
  f.A = torus::IMat::identity(d);
  for (int i = 1; i < d; ++i) f.A.at(i, i - 1) = 1;
  f.t.assign(static_cast<std::size_t>(d), Rat(0));
  f.t[0] = alpha;
  return f;
}

orbitpoly::BinomialPhase chain_thetas(const torus::TorusPoint<Rat>& z, const Rat& alpha) {
  const std::size_t d = z.coords.size();
  orbitpoly::BinomialPhase theta;
  theta.thetas.resize(d + 1);
  for (std::size_t j = 0; j < d; ++j) theta.thetas[j] = to_double(z.coords[d - 1 - j]);
  theta.thetas[d] = to_double(alpha);
  return theta;
}

namespace {

void require_chain_form(const torus::AffineMap<Rat>& f) {
  const int d = f.A.rows();
  if (f.A.cols() != d || static_cast<int>(f.t.size()) != d)
    throw ConfigError("quasi_eigen_crosscheck: malformed affine map");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Int want = (i == j) ? 1 : (j == i - 1 ? 1 : 0);
      if (f.A.at(i, j) != want)
        throw ConfigError("quasi_eigen_crosscheck: flow is not the chain map");
    }
  for (int i = 1; i < d; ++i)
    if (f.t[static_cast<std::size_t>(i)] != 0)
      throw ConfigError("quasi_eigen_crosscheck: chain translation must be (alpha, 0, ..., 0)");
}

}  // namespace

QuasiEigenResult quasi_eigen_crosscheck(const orbitpoly::BinomialPhase& theta,
                                        const torus::AffineMap<Rat>& flow,
                                        const torus::TorusPoint<Rat>& z, std::uint64_t n_max) {
  require_chain_form(flow);
  const std::size_t d = static_cast<std::size_t>(flow.A.rows());
  if (z.coords.size() != d) throw ConfigError("quasi_eigen_crosscheck: point dimension mismatch");

  torus::Orbit<Rat> orbit(torus::Flow<Rat>(flow), z);
  QuasiEigenResult res;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    orbit.advance();
    double lhs_phase = to_double(orbit.point().coords[d - 1]);
    double rhs_phase = binom_phase_mod1(theta.thetas, n);
    double dev = std::abs(e2pi(lhs_phase) - e2pi(rhs_phase));
    if (dev > res.max_deviation) {
      res.max_deviation = dev;
      res.argmax_n = n;
    }
  }
  return res;
}

}  // namespace osc::averaging
