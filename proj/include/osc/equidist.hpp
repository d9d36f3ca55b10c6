// equidist.hpp
//
// Equidistribution toolkit for 1-D point samples.
//
//   star_discrepancy            D*_N by the sorted-points formula
//                               max_i max(i/N - u_(i), u_(i) - (i-1)/N).
//   star_discrepancy_bruteforce O(N^2) oracle over anchored intervals [0, t)
//                               with t running through the sample values; it
//                               forms the same candidate quotients i/N as the
//                               sorted formula, so the two agree to the bit.
//   weyl_criterion_battery      |(1/N) sum e(h x_n)| for h = 1..h_max; the
//                               magnitudes for -h equal those for h, so only
//                               positive frequencies are computed.
//   koksma_experiment           samples dyadic beta in an interval and, per
//                               (beta, pattern), streams the fractional parts
//                               frac(alpha g(beta) (sum_i k_i beta^{l_i})
//                               beta^n) through the high-precision kernel,
//                               scoring each sample against discrepancy and
//                               Weyl thresholds.
//
// Per-beta cells are independent; results merge by sample index, so reports
// are byte-identical for any worker count.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "osc/averaging.hpp"
#include "osc/numeric.hpp"
#include "osc/seqgen.hpp"

namespace osc::equidist {

using averaging::ChowlaPattern;

struct PointSample1D {
  std::vector<double> values;

  std::size_t n() const { return values.size(); }
  void validate() const;  // nonempty, every value in [0,1)
};

// Classical sorted-points formula, O(N log N).
double star_discrepancy(const PointSample1D& sample);

// Anchored-interval enumeration without sorting, O(N^2); guarded to N <= 5000.
double star_discrepancy_bruteforce(const PointSample1D& sample);

struct WeylBattery {
  std::vector<double> magnitude;  // |S(h)| for h = 1..h_max
  double max = 0.0;
};

WeylBattery weyl_criterion_battery(const PointSample1D& sample, int h_max);

// ===========================================================================
// the sampled-beta experiment
// ===========================================================================

struct KoksmaThresholds {
  // Row passes iff D*_N < disc_coeff / sqrt(N) and the Weyl battery max over
  // h <= h_max stays below weyl_coeff / sqrt(N).  sqrt(N) is the random-
  // sample scale; no sharper rate is assumed.
  double disc_coeff = 3.0;
  double weyl_coeff = 4.0;
  int h_max = 8;
};

struct KoksmaConfig {
  Rat alpha = Rat(1);
  std::vector<Rat> g = {Rat(1)};  // constant first, all >= 0, g(beta) > 0
  double beta_lo = 1.1;
  double beta_hi = 3.0;
  int samples = 200;
  // Shifts l_i and exponents k_i of each pattern enter the folded scale
  // alpha * g(beta) * sum_i k_i beta^{l_i}; default is the bare sequence.
  std::vector<ChowlaPattern> patterns = {ChowlaPattern{{0}, {1}}};
  std::uint64_t n = 4000;
  std::uint64_t seed = 20260815;
  KoksmaThresholds thresholds;
  seqgen::PrecisionPolicy policy;
  int threads = 1;

  void validate() const;
};

struct KoksmaRow {
  Rat beta;
  std::string pattern;
  double discrepancy = 0.0;
  double weyl_max = 0.0;
  bool pass = false;
  bool skipped = false;  // precision budget exceeded; recorded, counts as fail
};

struct KoksmaResult {
  std::vector<KoksmaRow> rows;  // beta-major, pattern order as configured
  std::uint64_t n = 0;
  // Fraction of sampled beta whose every pattern row passes.
  double pass_fraction = 0.0;
};

KoksmaResult koksma_experiment(const KoksmaConfig& cfg);

// The exact dyadic beta values the experiment draws for this seed: each is
// lo + u (hi - lo) with u a 53-bit dyadic from the PRNG, evaluated in double
// arithmetic so the sample is representable exactly.
std::vector<Rat> sample_betas(double lo, double hi, int count, std::uint64_t seed);

// frac(scale * beta^n) for n = 1..n; delegates to the certified kernel.
PointSample1D frac_parts(const Rat& beta, const Rat& scale, std::uint64_t n,
                         const seqgen::PrecisionPolicy& policy);
PointSample1D frac_parts(const seqgen::ExpBetaSpec& spec, std::uint64_t n);

}  // namespace osc::equidist
