// Discrepancy routes against each other and against hand-computed samples,
// the Weyl battery on grids with known exponential sums, and the sampled-beta
// experiment: exact dyadic draws, folded pattern scales, worker-count
// determinism, and the precision-budget skip path.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "osc/equidist.hpp"
#include "osc/numeric.hpp"
#include "osc/seqgen.hpp"

using namespace osc;
using namespace osc::equidist;

namespace {

PointSample1D centered_grid(std::size_t n) {
  PointSample1D s;
  s.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    s.values.push_back((2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
  return s;
}

}  // namespace

// ===========================================================================
// star discrepancy
// ===========================================================================

TEST_CASE("single points and centered grids have closed-form discrepancy") {
  PointSample1D one{{0.25}};
  CHECK(star_discrepancy(one) == 0.75);  // max(1 - x, x)
  CHECK(star_discrepancy_bruteforce(one) == 0.75);

  // grid (2i+1)/(2N): every interval endpoint is off by exactly 1/(2N)
  CHECK(star_discrepancy(centered_grid(8)) == 0.0625);
  CHECK(star_discrepancy(centered_grid(100)) == doctest::Approx(0.005).epsilon(1e-12));

  // all mass at one spot: D* = 1 approached from just above 0
  PointSample1D zeros{{0.0, 0.0, 0.0}};
  CHECK(star_discrepancy(zeros) == 1.0);
}

TEST_CASE("tied samples are handled identically by both routes") {
  PointSample1D tied{{0.25, 0.25, 0.75}};
  double fast = star_discrepancy(tied);
  CHECK(fast == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
  CHECK(fast == star_discrepancy_bruteforce(tied));
}

TEST_CASE("both routes agree bitwise on random samples") {
  std::mt19937_64 rng(20260815);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(rng() % 400);
    PointSample1D s;
    s.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(rng_unit(rng));
    // inject ties to stress the <= / < split
    if (n > 3) {
      s.values[1] = s.values[0];
      s.values[3] = s.values[2];
    }
    CHECK(star_discrepancy(s) == star_discrepancy_bruteforce(s));
  }
}

TEST_CASE("the brute-force route ignores input order") {
  PointSample1D a{{0.9, 0.1, 0.5, 0.1, 0.3}};
  PointSample1D b{{0.1, 0.3, 0.1, 0.5, 0.9}};
  CHECK(star_discrepancy_bruteforce(a) == star_discrepancy_bruteforce(b));
  CHECK(star_discrepancy(a) == star_discrepancy_bruteforce(a));
}

TEST_CASE("samples are validated before measuring") {
  CHECK_THROWS_AS(star_discrepancy(PointSample1D{}), ConfigError);
  CHECK_THROWS_AS(star_discrepancy(PointSample1D{{1.0}}), ConfigError);
  CHECK_THROWS_AS(star_discrepancy(PointSample1D{{-0.1}}), ConfigError);
  PointSample1D big;
  big.values.assign(5001, 0.5);
  CHECK_THROWS_AS(star_discrepancy_bruteforce(big), ConfigError);
  CHECK_NOTHROW(star_discrepancy(big));
}

// ===========================================================================
// Weyl battery
// ===========================================================================

TEST_CASE("two antipodal points kill odd frequencies and keep even ones") {
  PointSample1D s{{0.0, 0.5}};
  auto battery = weyl_criterion_battery(s, 4);
  REQUIRE(battery.magnitude.size() == 4);
  CHECK(battery.magnitude[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(battery.magnitude[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(battery.magnitude[2] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(battery.magnitude[3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(battery.max == battery.magnitude[1]);
}

TEST_CASE("a centered grid zeroes every frequency below its size") {
  auto battery = weyl_criterion_battery(centered_grid(16), 8);
  for (double m : battery.magnitude) CHECK(m < 1e-14);
  CHECK_THROWS_AS(weyl_criterion_battery(centered_grid(16), 0), ConfigError);
}

// ===========================================================================
// beta sampling
// ===========================================================================

TEST_CASE("beta draws are deterministic, in range, and exactly dyadic") {
  auto a = sample_betas(1.1, 3.0, 32, 7);
  auto b = sample_betas(1.1, 3.0, 32, 7);
  REQUIRE(a.size() == 32);
  CHECK(a == b);
  for (const auto& beta : a) {
    CHECK(beta > 1);
    CHECK(beta < 3);
    // drawn in double arithmetic, so the rational is the double, exactly
    CHECK(rat_from_double(to_double(beta)) == beta);
  }
  CHECK(sample_betas(1.1, 3.0, 32, 8) != a);
  CHECK_THROWS_AS(sample_betas(1.0, 3.0, 4, 7), ConfigError);
  CHECK_THROWS_AS(sample_betas(2.0, 1.5, 4, 7), ConfigError);
  CHECK_THROWS_AS(sample_betas(1.1, 3.0, 0, 7), ConfigError);
}

// ===========================================================================
// fractional-part streams
// ===========================================================================

TEST_CASE("frac_parts matches the exact rational fractional parts") {
  // beta = 3/2: frac(alpha g(beta) beta^n) computable exactly in Rat
  const Rat beta(3, 2);
  const Rat scale = Rat(1, 3) * (Rat(1, 2) + Rat(2) * beta);  // alpha (g0 + g1 beta)
  seqgen::PrecisionPolicy policy;
  auto pts = frac_parts(beta, scale, 120, policy);
  REQUIRE(pts.values.size() == 120);
  Rat pw(1);
  for (std::uint64_t n = 1; n <= 120; ++n) {
    pw *= beta;
    CHECK(std::abs(pts.values[n - 1] - to_double(mod1(scale * pw))) < 1e-15);
  }
}

TEST_CASE("integer beta collapses the sample to zero, a total equidistribution failure") {
  auto pts = frac_parts(Rat(2), Rat(1), 64, seqgen::PrecisionPolicy{});
  for (double v : pts.values) CHECK(v == 0.0);
  CHECK(star_discrepancy(pts) == 1.0);
}

TEST_CASE("the spec overload respects its own bounds") {
  seqgen::ExpBetaSpec spec;
  spec.alpha = Rat(1, 3);
  spec.beta = Rat(3, 2);
  spec.g = {Rat(1)};
  spec.n_max = 100;
  auto pts = frac_parts(spec, 100);
  CHECK(pts.values.size() == 100);
  CHECK_THROWS_AS(frac_parts(spec, 101), ConfigError);
  CHECK_THROWS_AS(frac_parts(Rat(3, 2), Rat(1), 0, seqgen::PrecisionPolicy{}), ConfigError);
}

// ===========================================================================
// the koksma experiment
// ===========================================================================

TEST_CASE("koksma config validation") {
  KoksmaConfig ok;
  CHECK_NOTHROW(ok.validate());

  KoksmaConfig c = ok;
  c.alpha = Rat(0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.g = {Rat(-1)};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.beta_lo = 0.9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.patterns.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.n = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.thresholds.h_max = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("each koksma cell scores the folded scale alpha g(beta) sum k_i beta^l_i") {
  KoksmaConfig cfg;
  cfg.alpha = Rat(2, 7);
  cfg.g = {Rat(1, 2), Rat(2)};
  cfg.samples = 1;
  cfg.n = 300;
  cfg.patterns = {ChowlaPattern{{0, 2}, {1, 3}}};
  auto res = koksma_experiment(cfg);
  REQUIRE(res.rows.size() == 1);

  const Rat beta = sample_betas(cfg.beta_lo, cfg.beta_hi, 1, cfg.seed)[0];
  CHECK(res.rows[0].beta == beta);
  CHECK(res.rows[0].pattern == "l0e1+l2e3");
  const Rat gval = cfg.g[0] + cfg.g[1] * beta;
  const Rat comb = Rat(1) + Rat(3) * beta * beta;
  auto pts = frac_parts(beta, cfg.alpha * gval * comb, cfg.n, cfg.policy);
  CHECK(res.rows[0].discrepancy == star_discrepancy(pts));
  CHECK(res.rows[0].weyl_max == weyl_criterion_battery(pts, cfg.thresholds.h_max).max);
}

TEST_CASE("koksma results are row-ordered and worker-count independent") {
  KoksmaConfig cfg;
  cfg.samples = 6;
  cfg.n = 500;
  cfg.patterns = {ChowlaPattern{{0}, {1}}, ChowlaPattern{{0, 1}, {1, 1}}};
  auto one = koksma_experiment(cfg);
  cfg.threads = 3;
  auto three = koksma_experiment(cfg);

  REQUIRE(one.rows.size() == 12);
  REQUIRE(three.rows.size() == 12);
  CHECK(one.pass_fraction == three.pass_fraction);
  auto betas = sample_betas(cfg.beta_lo, cfg.beta_hi, cfg.samples, cfg.seed);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].beta == betas[i / 2]);  // beta-major layout
    CHECK(one.rows[i].beta == three.rows[i].beta);
    CHECK(one.rows[i].pattern == three.rows[i].pattern);
    CHECK(one.rows[i].discrepancy == three.rows[i].discrepancy);
    CHECK(one.rows[i].weyl_max == three.rows[i].weyl_max);
    CHECK(one.rows[i].pass == three.rows[i].pass);
  }
}

TEST_CASE("pass_fraction counts betas whose every pattern row passes") {
  KoksmaConfig cfg;
  cfg.samples = 10;
  cfg.n = 800;
  auto res = koksma_experiment(cfg);
  std::size_t good = 0;
  for (std::size_t bi = 0; bi < 10; ++bi) {
    bool all = true;
    for (std::size_t pi = 0; pi < cfg.patterns.size(); ++pi)
      all = all && res.rows[bi * cfg.patterns.size() + pi].pass;
    good += all;
  }
  CHECK(res.pass_fraction == static_cast<double>(good) / 10.0);
  CHECK(res.n == 800);
}

TEST_CASE("a tiny precision ceiling turns cells into skips, never passes") {
  KoksmaConfig cfg;
  cfg.samples = 3;
  cfg.n = 200'000;  // needs far more than 128 bits at beta up to 3
  cfg.policy.ceiling_bits = 128;
  auto res = koksma_experiment(cfg);
  REQUIRE(res.rows.size() == 3);
  for (const auto& r : res.rows) {
    CHECK(r.skipped);
    CHECK_FALSE(r.pass);
    CHECK(std::isnan(r.discrepancy));
    CHECK(std::isnan(r.weyl_max));
  }
  CHECK(res.pass_fraction == 0.0);
}
