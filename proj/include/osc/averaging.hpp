// averaging.hpp
//
// Every Cesaro-average experiment in one place:
//
//   cesaro_disjointness   S_N = (1/N) sum c_n phi(f^n x), streamed along an
//                         orbit with checkpointed partial sums.
//   weyl_average          (1/N) sum c_n e(2 pi i P(n)) driven by the phasor
//                         chain from phase.hpp (no trig in the hot loop).
//   arith_weyl_series     the same sum restricted to n = m k + l but still
//                         normalized by N, exactly as the defining formula
//                         writes it.  k = 1, l = 0 runs the identical code
//                         path as the plain average, so those rows agree
//                         bitwise.
//   oscillation_order_test / arithmetic_oscillation_test
//                         batteries over sampled phase polynomials; each
//                         (polynomial, progression) cell is an independent
//                         reduction, fanned out deterministically.
//   chowla_test           shifted multiplicative correlations with the
//                         degenerate all-modulus patterns marked excluded.
//   mean_attraction_estimate  running average of the orbit distance.
//   quasi_eigen_crosscheck    binomial-phase model against the exact orbit
//                             of the d-dimensional chain map.
//
// Accumulation is Kahan-compensated complex double; one rounding per term.

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "osc/numeric.hpp"
#include "osc/orbitpoly.hpp"
#include "osc/parallel.hpp"
#include "osc/phase.hpp"
#include "osc/seqgen.hpp"
#include "osc/torus.hpp"

namespace osc::averaging {

// ===========================================================================
// checkpointed partial sums
// ===========================================================================

struct CesaroSeries {
  std::vector<std::uint64_t> checkpoints;  // strictly increasing
  std::vector<std::complex<double>> values;
  std::vector<double> magnitude;

  double final_abs() const { return magnitude.empty() ? 0.0 : magnitude.back(); }
};

void validate_checkpoints(const std::vector<std::uint64_t>& checkpoints);

namespace detail {

// Shared accumulation skeleton: feed terms indexed by n in increasing order,
// emit value/N at each checkpoint.
class SeriesBuilder {
 public:
  explicit SeriesBuilder(const std::vector<std::uint64_t>& checkpoints) {
    validate_checkpoints(checkpoints);
    out_.checkpoints = checkpoints;
  }

  std::uint64_t last_n() const { return out_.checkpoints.back(); }

  // n values must arrive nondecreasing; call once per term.
  void add(std::uint64_t n, std::complex<double> term) {
    flush_before(n);
    acc_.add(term);
  }

  CesaroSeries finish() {
    flush_before(out_.checkpoints.back() + 1);
    return std::move(out_);
  }

 private:
  void flush_before(std::uint64_t n) {
    while (next_ < out_.checkpoints.size() && out_.checkpoints[next_] < n) {
      std::complex<double> v =
          acc_.value() / static_cast<double>(out_.checkpoints[next_]);
      out_.values.push_back(v);
      out_.magnitude.push_back(std::abs(v));
      ++next_;
    }
  }

  KahanComplexSum acc_;
  CesaroSeries out_;
  std::size_t next_ = 0;
};

}  // namespace detail

// ===========================================================================
// disjointness and Weyl sums
// ===========================================================================

template <class S>
CesaroSeries cesaro_disjointness(const seqgen::ComplexSequence& seq,
                                 const torus::Flow<S>& flow,
                                 const torus::TrigPolynomial& obs,
                                 const torus::TorusPoint<S>& x0,
                                 const std::vector<std::uint64_t>& checkpoints) {
  detail::SeriesBuilder series(checkpoints);
  if (series.last_n() > seq.length())
    throw ConfigError("cesaro_disjointness: sequence shorter than final checkpoint");
  torus::Orbit<S> orbit(flow, x0);
  auto cur = seq.cursor(1);
  const std::uint64_t n_last = series.last_n();
  for (std::uint64_t n = 1; n <= n_last; ++n) {
    orbit.advance();
    std::complex<double> c = cur->next();
    std::vector<double> xs = torus::coords_double(orbit.point());
    series.add(n, c * torus::trigpoly_eval(obs, xs));
  }
  return series.finish();
}

// Progression n = m k + l (m >= 0) intersected with [1, N]; normalization by
// N.  k = 1, l = 0 is the plain Weyl sum.
CesaroSeries arith_weyl_series(const seqgen::ComplexSequence& seq, const PhasePolynomial& p,
                               std::uint64_t k, std::uint64_t l,
                               const std::vector<std::uint64_t>& checkpoints);

CesaroSeries weyl_series(const seqgen::ComplexSequence& seq, const PhasePolynomial& p,
                         const std::vector<std::uint64_t>& checkpoints);

std::complex<double> weyl_average(const seqgen::ComplexSequence& seq, const PhasePolynomial& p,
                                  std::uint64_t n_max);

// Oracle path: per-term exact phase reduction plus trig, no chain.
std::complex<double> weyl_average_direct(const seqgen::ComplexSequence& seq,
                                         const PhasePolynomial& p, std::uint64_t n_max);

// ===========================================================================
// polynomial sampler
// ===========================================================================

struct SamplerConfig {
  int random_count = 16;
  std::uint64_t seed = 20260815;
  bool structured = true;  // adds the four fixed corner cases
  std::vector<PhasePolynomial> extra;
};

// Deterministic battery of degree-<=d phase polynomials: `random_count`
// uniform coefficient vectors in [0,1)^(d+1), then the four structured rows
// (zero; leading coefficient 1/2; frac(phi^(j+1)); prime reciprocals), then
// caller extras.
std::vector<PhasePolynomial> sample_phase_polys(int degree, const SamplerConfig& cfg);

// ===========================================================================
// oscillation batteries
// ===========================================================================

struct OscillationRow {
  PhasePolynomial poly;
  CesaroSeries series;
  bool pass = false;
  bool inconclusive = false;  // magnitude did not decay across checkpoints
};

struct OscillationReport {
  int order = 0;
  double threshold = 0.0;
  std::vector<OscillationRow> rows;
  bool all_pass = false;
  double max_final = 0.0;  // max over rows of |S| at the last checkpoint
};

OscillationReport oscillation_order_test(const seqgen::ComplexSequence& seq, int order,
                                         const SamplerConfig& sampler,
                                         const std::vector<std::uint64_t>& checkpoints,
                                         double threshold, int threads = 1);

struct ArithRow {
  std::uint64_t k = 1, l = 0;
  PhasePolynomial poly;
  CesaroSeries series;
  bool pass = false;
};

struct ArithReport {
  int order = 0;
  std::uint64_t k_max = 1;
  double threshold = 0.0;
  std::vector<ArithRow> rows;
  bool all_pass = false;
  double max_final = 0.0;
};

ArithReport arithmetic_oscillation_test(const seqgen::ComplexSequence& seq, int order,
                                        std::uint64_t k_max, const SamplerConfig& sampler,
                                        const std::vector<std::uint64_t>& checkpoints,
                                        double threshold, int threads = 1);

// ===========================================================================
// Chowla correlations
// ===========================================================================

struct ChowlaPattern {
  std::vector<std::uint32_t> shifts;     // strictly increasing, l_1 < ... < l_r
  std::vector<std::uint32_t> exponents;  // k_i >= 1
  std::string label() const;             // "l0e1+l2e2" style, CSV safe
  void validate() const;
};

struct ChowlaRow {
  ChowlaPattern pattern;
  std::complex<double> avg{0.0, 0.0};
  bool excluded = false;  // degenerate: c^k = |c| held for every factor and n
};

// One streaming pass per pattern; `excluded` marks patterns where every
// factor degenerated to its modulus (those are not counterexamples).
std::vector<ChowlaRow> chowla_test(const seqgen::ComplexSequence& seq,
                                   const std::vector<ChowlaPattern>& patterns,
                                   std::uint64_t n_max, double admissibility_tol = 1e-12);

// All patterns with r <= r_max, shifts within [0, shift_max], exponents in
// [1, expo_max]; deterministic order.
std::vector<ChowlaPattern> enumerate_patterns(int r_max, std::uint32_t shift_max,
                                              std::uint32_t expo_max);

// ===========================================================================
// mean attraction
// ===========================================================================

template <class S>
CesaroSeries mean_attraction_estimate(const torus::Flow<S>& flow,
                                      const torus::TorusPoint<S>& x,
                                      const torus::TorusPoint<S>& z,
                                      const std::vector<std::uint64_t>& checkpoints) {
  detail::SeriesBuilder series(checkpoints);
  torus::Orbit<S> ox(flow, x), oz(flow, z);
  const std::uint64_t n_last = series.last_n();
  for (std::uint64_t n = 1; n <= n_last; ++n) {
    ox.advance();
    oz.advance();
    double dist = torus::torus_distance(torus::coords_double(ox.point()),
                                        torus::coords_double(oz.point()));
    series.add(n, {dist, 0.0});
  }
  return series.finish();
}

// ===========================================================================
// quasi-eigenfunction phases
// ===========================================================================

// The d-dimensional chain map x1 -> x1 + alpha, xi -> xi + x_{i-1}.
torus::AffineMap<Rat> chain_flow(int d, const Rat& alpha);

// thetas for g = e(x_d) along the chain orbit of z:
// theta_j = z_{d-j} for j < d, theta_d = alpha.
orbitpoly::BinomialPhase chain_thetas(const torus::TorusPoint<Rat>& z, const Rat& alpha);

struct QuasiEigenResult {
  double max_deviation = 0.0;
  std::uint64_t argmax_n = 0;
};

// max over 1 <= n <= n_max of |e(x_d(f^n z)) - e(sum_j theta_j C(n,j))|.
// Rejects flows that are not in chain form.
QuasiEigenResult quasi_eigen_crosscheck(const orbitpoly::BinomialPhase& theta,
                                        const torus::AffineMap<Rat>& flow,
                                        const torus::TorusPoint<Rat>& z, std::uint64_t n_max);

}  // namespace osc::averaging
