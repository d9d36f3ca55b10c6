#include "osc/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "osc/parallel.hpp"

namespace osc::equidist {

void PointSample1D::validate() const {
  if (values.empty()) throw ConfigError("point sample: empty");
  for (double v : values)
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError("point sample: value outside [0,1)");
}

// ===========================================================================
// star discrepancy, fast and slow
// ===========================================================================

double star_discrepancy(const PointSample1D& sample) {
  sample.validate();
  std::vector<double> u = sample.values;
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double best = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double hi = static_cast<double>(i + 1) / n - u[i];
    double lo = u[i] - static_cast<double>(i) / n;
    best = std::max(best, std::max(hi, lo));
  }
  return best;
}

double star_discrepancy_bruteforce(const PointSample1D& sample) {
  sample.validate();
  const std::vector<double>& u = sample.values;
  if (u.size() > 5000) throw ConfigError("star_discrepancy_bruteforce: sample exceeds N = 5000");
  const double n = static_cast<double>(u.size());

  // The supremum over anchored intervals [0, t) is approached as t crosses a
  // sample value v: from above it is #{u <= v}/N - v, from below
  // v - #{u < v}/N.  Counting per value keeps this route sort-free.
  double best = 0.0;
  for (double v : u) {
    std::size_t le = 0, lt = 0;
    for (double w : u) {
      le += (w <= v);
      lt += (w < v);
    }
    double hi = static_cast<double>(le) / n - v;
    double lo = v - static_cast<double>(lt) / n;
    best = std::max(best, std::max(hi, lo));
  }
  return best;
}

// ===========================================================================
// Weyl battery
// ===========================================================================

WeylBattery weyl_criterion_battery(const PointSample1D& sample, int h_max) {
  sample.validate();
  if (h_max < 1) throw ConfigError("weyl_criterion_battery: h_max must be >= 1");
  WeylBattery out;
  out.magnitude.reserve(static_cast<std::size_t>(h_max));
  const double n = static_cast<double>(sample.n());
  for (int h = 1; h <= h_max; ++h) {
    KahanComplexSum acc;
    for (double x : sample.values) acc.add(e2pi(static_cast<double>(h) * x));
    double mag = std::abs(acc.value() / n);
    out.magnitude.push_back(mag);
    out.max = std::max(out.max, mag);
  }
  return out;
}

// ===========================================================================
// Koksma experiment
// ===========================================================================

void KoksmaConfig::validate() const {
  if (alpha == 0) throw ConfigError("koksma: alpha must be nonzero");
  if (g.empty()) throw ConfigError("koksma: g needs at least one coefficient");
  for (const auto& c : g)
    if (c < 0) throw ConfigError("koksma: g coefficients must be nonnegative");
  if (!(beta_lo > 1.0 && beta_hi > beta_lo))
    throw ConfigError("koksma: need 1 < beta_lo < beta_hi");
  if (samples < 1) throw ConfigError("koksma: samples must be >= 1");
  if (patterns.empty()) throw ConfigError("koksma: need at least one pattern");
  for (const auto& p : patterns) p.validate();
  if (n < 1) throw ConfigError("koksma: n must be >= 1");
  if (thresholds.h_max < 1) throw ConfigError("koksma: h_max must be >= 1");
}

std::vector<Rat> sample_betas(double lo, double hi, int count, std::uint64_t seed) {
  if (!(lo > 1.0 && hi > lo)) throw ConfigError("sample_betas: need 1 < lo < hi");
  if (count < 1) throw ConfigError("sample_betas: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Rat> betas;
  betas.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double b = lo + rng_unit(rng) * (hi - lo);
    if (!(b > 1.0)) b = std::nextafter(lo, hi);  // guards against rounding at the edge
    betas.push_back(rat_from_double(b));
  }
  return betas;
}

namespace {

// alpha * g(beta) * sum_i k_i beta^{l_i}, exact.
Rat folded_scale(const KoksmaConfig& cfg, const Rat& beta, const ChowlaPattern& pat) {
  Rat gval(0);
  for (std::size_t j = cfg.g.size(); j-- > 0;) gval = gval * beta + cfg.g[j];
  Rat comb(0);
  for (std::size_t i = 0; i < pat.shifts.size(); ++i)
    comb += Rat(static_cast<long>(pat.exponents[i])) * rat_pow(beta, pat.shifts[i]);
  return cfg.alpha * gval * comb;
}

}  // namespace

PointSample1D frac_parts(const Rat& beta, const Rat& scale, std::uint64_t n,
                         const seqgen::PrecisionPolicy& policy) {
  if (n < 1) throw ConfigError("frac_parts: n must be >= 1");
  seqgen::FracStream stream(beta, scale, n, policy);
  PointSample1D out;
  out.values.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.values.push_back(stream.next_frac());
  return out;
}

PointSample1D frac_parts(const seqgen::ExpBetaSpec& spec, std::uint64_t n) {
  spec.validate();
  if (n > spec.n_max) throw ConfigError("frac_parts: n exceeds the spec's n_max");
  return frac_parts(spec.beta, spec.scale(), n, spec.policy);
}

KoksmaResult koksma_experiment(const KoksmaConfig& cfg) {
  cfg.validate();
  const auto betas = sample_betas(cfg.beta_lo, cfg.beta_hi, cfg.samples, cfg.seed);
  const std::size_t np = cfg.patterns.size();
  const double sqrt_n = std::sqrt(static_cast<double>(cfg.n));
  const double disc_limit = cfg.thresholds.disc_coeff / sqrt_n;
  const double weyl_limit = cfg.thresholds.weyl_coeff / sqrt_n;

  KoksmaResult res;
  res.n = cfg.n;
  res.rows.resize(betas.size() * np);

  parallel_cells(betas.size(), cfg.threads, [&](std::size_t bi) {
    for (std::size_t pi = 0; pi < np; ++pi) {
      KoksmaRow row;
      row.beta = betas[bi];
      row.pattern = cfg.patterns[pi].label();
      try {
        PointSample1D pts =
            frac_parts(betas[bi], folded_scale(cfg, betas[bi], cfg.patterns[pi]), cfg.n,
                       cfg.policy);
        row.discrepancy = star_discrepancy(pts);
        row.weyl_max = weyl_criterion_battery(pts, cfg.thresholds.h_max).max;
        row.pass = row.discrepancy < disc_limit && row.weyl_max < weyl_limit;
      } catch (const PrecisionBudgetError&) {
        row.skipped = true;
        row.discrepancy = std::numeric_limits<double>::quiet_NaN();
        row.weyl_max = std::numeric_limits<double>::quiet_NaN();
      }
      res.rows[bi * np + pi] = std::move(row);
    }
  });

  std::size_t good = 0;
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    bool all = true;
    for (std::size_t pi = 0; pi < np; ++pi) all = all && res.rows[bi * np + pi].pass;
    good += all;
  }
  res.pass_fraction = static_cast<double>(good) / static_cast<double>(betas.size());
  return res;
}

}  // namespace osc::equidist
