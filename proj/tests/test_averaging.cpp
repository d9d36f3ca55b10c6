// Cesaro machinery: the phasor-chain Weyl averages against the per-term
// oracle, arithmetic progressions that partition the plain sum, Chowla
// correlation rows with hand-computable sequences, mean attraction along
// isometric flows, and the binomial-phase crosscheck of the chain map.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "osc/averaging.hpp"
#include "osc/numeric.hpp"
#include "osc/phase.hpp"
#include "osc/seqgen.hpp"
#include "osc/torus.hpp"

using namespace osc;
using namespace osc::averaging;

namespace {

const seqgen::MobiusSequence& mobius_1e6() {
  static seqgen::MobiusSequence seq(1'000'000);
  return seq;
}

// c_n = 1 for every n, unbounded
seqgen::SyntheticSequence ones() { return seqgen::SyntheticSequence(PhasePolynomial{}); }

seqgen::FileSequence alternating(std::size_t count) {
  std::vector<std::complex<double>> terms;
  terms.reserve(count);
  for (std::size_t n = 1; n <= count; ++n) terms.emplace_back(n % 2 ? -1.0 : 1.0, 0.0);
  return seqgen::FileSequence(std::move(terms), 1, "alternating");
}

}  // namespace

// ===========================================================================
// checkpoints and series plumbing
// ===========================================================================

TEST_CASE("checkpoint lists must be nonempty, positive, strictly increasing") {
  CHECK_THROWS_AS(validate_checkpoints({}), ConfigError);
  CHECK_THROWS_AS(validate_checkpoints({0, 5}), ConfigError);
  CHECK_THROWS_AS(validate_checkpoints({5, 5}), ConfigError);
  CHECK_THROWS_AS(validate_checkpoints({5, 3}), ConfigError);
  CHECK_NOTHROW(validate_checkpoints({1}));
  CHECK_NOTHROW(validate_checkpoints({2, 10, 11}));
}

TEST_CASE("a multi-checkpoint run reproduces each single-run prefix bitwise") {
  PhasePolynomial p({0.371, 0.618, 0.0041});
  auto series = weyl_series(mobius_1e6(), p, {100, 1000, 10'000});
  REQUIRE(series.values.size() == 3);
  CHECK(series.values[0] == weyl_average(mobius_1e6(), p, 100));
  CHECK(series.values[1] == weyl_average(mobius_1e6(), p, 1000));
  CHECK(series.values[2] == weyl_average(mobius_1e6(), p, 10'000));
  CHECK(series.magnitude[2] == std::abs(series.values[2]));
}

TEST_CASE("weyl averages reject a sequence shorter than the last checkpoint") {
  seqgen::SyntheticSequence capped(PhasePolynomial{}, 50);
  CHECK_THROWS_AS(weyl_average(capped, PhasePolynomial{}, 51), ConfigError);
  CHECK_NOTHROW(weyl_average(capped, PhasePolynomial{}, 50));
}

// ===========================================================================
// chain vs direct evaluation
// ===========================================================================

TEST_CASE("chain and direct Weyl averages agree to 1e-10 up to degree 6") {
  // one coefficient set, truncated per degree; degree 6 runs the full 1e6
  const std::vector<double> full = {0.371, 0.618, 0.0041, 0.00007, 0.314159, 0.2718, 0.1414};
  for (int deg = 1; deg <= 5; ++deg) {
    PhasePolynomial p(std::vector<double>(full.begin(), full.begin() + deg + 1));
    auto a = weyl_average(mobius_1e6(), p, 200'000);
    auto b = weyl_average_direct(mobius_1e6(), p, 200'000);
    CAPTURE(deg);
    CHECK(std::abs(a - b) < 1e-10);
  }
  PhasePolynomial p6(full);
  CHECK(std::abs(weyl_average(mobius_1e6(), p6, 1'000'000) -
                 weyl_average_direct(mobius_1e6(), p6, 1'000'000)) < 1e-10);
}

TEST_CASE("constant sequence with zero phase averages to exactly one") {
  auto seq = ones();
  CHECK(weyl_average(seq, PhasePolynomial{}, 10'000) == std::complex<double>(1.0, 0.0));
}

// ===========================================================================
// arithmetic progressions
// ===========================================================================

TEST_CASE("k = 1, l = 0 runs the same code path as the plain average") {
  PhasePolynomial p({0.25, 0.1, 0.31});
  auto plain = weyl_series(mobius_1e6(), p, {5000});
  auto arith = arith_weyl_series(mobius_1e6(), p, 1, 0, {5000});
  CHECK(plain.values.back() == arith.values.back());
  CHECK(plain.magnitude.back() == arith.magnitude.back());
}

TEST_CASE("progressions partition the plain sum") {
  PhasePolynomial p({0.371, 0.618, 0.0041});
  const std::uint64_t n = 20'000;
  const std::uint64_t k = 3;
  std::complex<double> sum{0.0, 0.0};
  for (std::uint64_t l = 0; l < k; ++l)
    sum += arith_weyl_series(mobius_1e6(), p, k, l, {n}).values.back();
  CHECK(std::abs(sum - weyl_average(mobius_1e6(), p, n)) < 1e-10);
}

TEST_CASE("progression counts against the constant sequence are exact") {
  auto seq = ones();
  // n = 2, 4, ..., 10000: 5000 terms over N = 10000
  auto even = arith_weyl_series(seq, PhasePolynomial{}, 2, 0, {10'000});
  CHECK(even.values.back() == std::complex<double>(0.5, 0.0));
  // n = 1, 3, ..., 9999
  auto odd = arith_weyl_series(seq, PhasePolynomial{}, 2, 1, {10'000});
  CHECK(odd.values.back() == std::complex<double>(0.5, 0.0));
  // progression starts above the only checkpoint: empty sum
  auto none = arith_weyl_series(seq, PhasePolynomial{}, 7, 5, {4});
  CHECK(none.values.back() == std::complex<double>(0.0, 0.0));
}

TEST_CASE("progression parameters are validated") {
  auto seq = ones();
  CHECK_THROWS_AS(arith_weyl_series(seq, PhasePolynomial{}, 0, 0, {10}), ConfigError);
  CHECK_THROWS_AS(arith_weyl_series(seq, PhasePolynomial{}, 3, 3, {10}), ConfigError);
  CHECK_THROWS_AS(arith_weyl_series(seq, PhasePolynomial{}, 3, 4, {10}), ConfigError);
}

// ===========================================================================
// sampler
// ===========================================================================

TEST_CASE("the polynomial battery is deterministic and degree-capped") {
  SamplerConfig cfg;
  cfg.random_count = 6;
  auto a = sample_phase_polys(3, cfg);
  auto b = sample_phase_polys(3, cfg);
  REQUIRE(a.size() == 10);  // 6 random + 4 structured
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].a == b[i].a);
    CHECK(a[i].degree() <= 3);
    for (double c : a[i].a) CHECK((c >= 0.0 && c < 1.0));
  }
  // structured block: zero row, then leading coefficient 1/2
  CHECK(a[6].degree() == -1);
  CHECK(a[7].a.back() == 0.5);
  CHECK(a[7].a.front() == 0.0);

  SamplerConfig other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(sample_phase_polys(3, other)[0].a != a[0].a);

  cfg.structured = false;
  cfg.extra = {PhasePolynomial({0.5})};
  CHECK(sample_phase_polys(3, cfg).size() == 7);
  CHECK_THROWS_AS(sample_phase_polys(-1, cfg), ConfigError);
}

// ===========================================================================
// oscillation batteries
// ===========================================================================

TEST_CASE("Mobius passes the order-2 battery at 3e4") {
  SamplerConfig sc;
  sc.random_count = 4;
  auto rep = oscillation_order_test(mobius_1e6(), 2, sc, {30'000}, 0.03);
  CHECK(rep.rows.size() == 8);
  CHECK(rep.all_pass);
  CHECK(rep.max_final < 0.03);
  for (const auto& r : rep.rows) {
    CHECK(r.pass);
    CHECK_FALSE(r.inconclusive);  // single checkpoint cannot flag growth
  }
}

TEST_CASE("a growing average is reported inconclusive, not just failing") {
  std::vector<std::complex<double>> terms;
  for (int n = 1; n <= 64; ++n) terms.emplace_back(n, 0.0);
  seqgen::FileSequence ramp(std::move(terms), 1, "ramp");
  SamplerConfig sc;
  sc.random_count = 0;
  sc.structured = false;
  sc.extra = {PhasePolynomial{}};
  auto rep = oscillation_order_test(ramp, 1, sc, {8, 64}, 1.0);
  REQUIRE(rep.rows.size() == 1);
  // |S_8| = 36/8, |S_64| = 2080/64, both exact in double
  CHECK(rep.rows[0].series.magnitude.front() == 4.5);
  CHECK(rep.rows[0].series.magnitude.back() == 32.5);
  CHECK(rep.rows[0].inconclusive);
  CHECK_FALSE(rep.rows[0].pass);
  CHECK_FALSE(rep.all_pass);
  CHECK(rep.max_final == 32.5);
}

TEST_CASE("battery rejects bad orders and oversized extras") {
  SamplerConfig sc;
  sc.random_count = 1;
  CHECK_THROWS_AS(oscillation_order_test(mobius_1e6(), 0, sc, {100}, 0.1), ConfigError);
  sc.extra = {PhasePolynomial({0.1, 0.2, 0.3})};  // degree 2 > order 1
  CHECK_THROWS_AS(oscillation_order_test(mobius_1e6(), 1, sc, {100}, 0.1), ConfigError);
  CHECK_THROWS_AS(arithmetic_oscillation_test(mobius_1e6(), 2, 0, SamplerConfig{}, {100}, 0.1),
                  ConfigError);
}

TEST_CASE("arithmetic battery cells cover every residue and match the plain rows") {
  SamplerConfig sc;
  sc.random_count = 2;
  auto rep = arithmetic_oscillation_test(mobius_1e6(), 2, 3, sc, {10'000}, 0.05);
  // 6 polynomials, k = 1..3 with k residues each: 6 * (1 + 2 + 3)
  REQUIRE(rep.rows.size() == 36);
  auto plain = oscillation_order_test(mobius_1e6(), 2, sc, {10'000}, 0.05);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(rep.rows[i].k == 1);
    CHECK(rep.rows[i].l == 0);
    CHECK(rep.rows[i].series.values.back() == plain.rows[i].series.values.back());
  }
}

TEST_CASE("batteries are worker-count independent") {
  SamplerConfig sc;
  sc.random_count = 3;
  auto one = oscillation_order_test(mobius_1e6(), 2, sc, {20'000}, 0.05, 1);
  auto four = oscillation_order_test(mobius_1e6(), 2, sc, {20'000}, 0.05, 4);
  REQUIRE(one.rows.size() == four.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i)
    CHECK(one.rows[i].series.values.back() == four.rows[i].series.values.back());
  CHECK(one.max_final == four.max_final);
}

// ===========================================================================
// Chowla correlations
// ===========================================================================

TEST_CASE("pattern labels and validation") {
  ChowlaPattern p{{0, 2}, {1, 3}};
  CHECK(p.label() == "l0e1+l2e3");
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS((ChowlaPattern{{}, {}}).validate(), ConfigError);
  CHECK_THROWS_AS((ChowlaPattern{{0}, {1, 2}}).validate(), ConfigError);
  CHECK_THROWS_AS((ChowlaPattern{{2, 2}, {1, 1}}).validate(), ConfigError);
  CHECK_THROWS_AS((ChowlaPattern{{2, 1}, {1, 1}}).validate(), ConfigError);
  CHECK_THROWS_AS((ChowlaPattern{{0}, {0}}).validate(), ConfigError);
}

TEST_CASE("alternating signs give exact correlation values") {
  auto seq = alternating(1002);
  auto rows = chowla_test(seq,
                          {ChowlaPattern{{0}, {1}}, ChowlaPattern{{0}, {2}},
                           ChowlaPattern{{0, 1}, {1, 1}}, ChowlaPattern{{0, 2}, {1, 1}}},
                          1000);
  REQUIRE(rows.size() == 4);
  // c_n alternates, N even: cancels exactly
  CHECK(rows[0].avg == std::complex<double>(0.0, 0.0));
  CHECK_FALSE(rows[0].excluded);
  // c_n^2 = 1 = |c_n| every n: degenerate, marked excluded
  CHECK(rows[1].avg == std::complex<double>(1.0, 0.0));
  CHECK(rows[1].excluded);
  // c_n c_{n+1} = -1: a genuine correlation, not excluded
  CHECK(rows[2].avg == std::complex<double>(-1.0, 0.0));
  CHECK_FALSE(rows[2].excluded);
  // c_n c_{n+2} = +1: correlated at even shifts too
  CHECK(rows[3].avg == std::complex<double>(1.0, 0.0));
  CHECK_FALSE(rows[3].excluded);
}

TEST_CASE("the r = 1, exponent 1 row is bitwise the plain average") {
  auto seq = alternating(1000);
  auto rows = chowla_test(seq, {ChowlaPattern{{0}, {1}}}, 1000);
  CHECK(rows[0].avg == weyl_average(seq, PhasePolynomial{}, 1000));
}

TEST_CASE("higher exponents run through the power ladder") {
  // c_n = i^n; c_n * c_{n+1}^3 = i^{4n+3} = -i for every n
  seqgen::SyntheticSequence seq(PhasePolynomial({0.0, 0.25}));
  auto rows = chowla_test(seq, {ChowlaPattern{{0, 1}, {1, 3}}, ChowlaPattern{{0}, {4}}}, 1000);
  CHECK(std::abs(rows[0].avg - std::complex<double>(0.0, -1.0)) < 5e-13);
  CHECK_FALSE(rows[0].excluded);
  // c_n^4 = 1 = |c_n|: degenerate again
  CHECK(std::abs(rows[1].avg - std::complex<double>(1.0, 0.0)) < 5e-13);
  CHECK(rows[1].excluded);
}

TEST_CASE("Mobius correlations are small and excluded exactly when all exponents are even") {
  auto patterns = enumerate_patterns(2, 2, 2);
  REQUIRE(patterns.size() == 18);
  CHECK(patterns.front().label() == "l0e1");
  auto rows = chowla_test(mobius_1e6(), patterns, 50'000);
  for (const auto& r : rows) {
    bool all_even = true;
    for (auto e : r.pattern.exponents) all_even = all_even && e % 2 == 0;
    CAPTURE(r.pattern.label());
    // mu^2k = mu^2 = |mu| pointwise, so exactly those rows degenerate
    CHECK(r.excluded == all_even);
    if (!r.excluded) CHECK(std::abs(r.avg) < 0.05);
  }
}

TEST_CASE("chowla_test validates pattern reach and n_max") {
  auto seq = alternating(100);
  CHECK_THROWS_AS(chowla_test(seq, {ChowlaPattern{{0}, {1}}}, 0), ConfigError);
  CHECK_THROWS_AS(chowla_test(seq, {ChowlaPattern{{0, 5}, {1, 1}}}, 100), ConfigError);
  CHECK_NOTHROW(chowla_test(seq, {ChowlaPattern{{0, 5}, {1, 1}}}, 95));
}

TEST_CASE("pattern enumeration is ordered and respects its bounds") {
  auto pats = enumerate_patterns(1, 1, 3);
  // shifts {0}, {1}; exponents 1..3 each
  REQUIRE(pats.size() == 6);
  CHECK(pats[0].label() == "l0e1");
  CHECK(pats[1].label() == "l0e2");
  CHECK(pats[2].label() == "l0e3");
  CHECK(pats[3].label() == "l1e1");
  for (const auto& p : pats) CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(enumerate_patterns(0, 1, 1), ConfigError);
  CHECK_THROWS_AS(enumerate_patterns(1, 1, 0), ConfigError);
}

// ===========================================================================
// disjointness averages along flows
// ===========================================================================

TEST_CASE("full rotation cycles cancel a pure character exactly") {
  auto seq = ones();
  torus::Flow<Rat> rot(chain_flow(1, Rat(1, 4)));
  torus::TrigPolynomial obs;
  obs.terms[{1}] = {1.0, 0.0};
  auto series = cesaro_disjointness(seq, rot, obs, torus::make_point(std::vector<Rat>{Rat(0)}), {400});
  CHECK(series.final_abs() < 1e-13);
}

TEST_CASE("a constant observable passes straight through") {
  auto seq = ones();
  torus::Flow<Rat> rot(chain_flow(1, Rat(1, 3)));
  torus::TrigPolynomial obs;
  obs.terms[{0}] = {0.75, 0.0};
  auto series = cesaro_disjointness(seq, rot, obs, torus::make_point(std::vector<Rat>{Rat(0)}), {100, 250});
  CHECK(series.values.front() == std::complex<double>(0.75, 0.0));
  CHECK(series.values.back() == std::complex<double>(0.75, 0.0));
}

TEST_CASE("disjointness average rejects short sequences") {
  seqgen::SyntheticSequence capped(PhasePolynomial{}, 10);
  torus::Flow<Rat> rot(chain_flow(1, Rat(1, 4)));
  torus::TrigPolynomial obs;
  obs.terms[{1}] = {1.0, 0.0};
  CHECK_THROWS_AS(cesaro_disjointness(capped, rot, obs, torus::make_point(std::vector<Rat>{Rat(0)}), {11}),
                  ConfigError);
}

// ===========================================================================
// mean attraction
// ===========================================================================

TEST_CASE("rotations keep the mean orbit distance constant") {
  torus::Flow<Rat> rot(chain_flow(1, Rat(1, 4)));
  auto series = mean_attraction_estimate(rot, torus::make_point(std::vector<Rat>{Rat(0)}),
                                         torus::make_point(std::vector<Rat>{Rat(1, 8)}), {10, 100});
  CHECK(series.values.front() == std::complex<double>(0.125, 0.0));
  CHECK(series.values.back() == std::complex<double>(0.125, 0.0));

  auto same = mean_attraction_estimate(rot, torus::make_point(std::vector<Rat>{Rat(1, 3)}),
                                       torus::make_point(std::vector<Rat>{Rat(1, 3)}), {50});
  CHECK(same.values.back() == std::complex<double>(0.0, 0.0));
}

TEST_CASE("a fiber offset over a shared base never decays") {
  // same x1 orbit drives both copies, so the x2 gap of 1/2 is invariant
  torus::SimplePolySkew<Rat> skew;
  skew.d = 2;
  skew.k = 2;
  skew.a = Rat(1, 4);
  skew.b.assign(3, std::vector<Rat>(3, Rat(0)));
  skew.h.resize(3);
  skew.h[2].c = {Rat(0), Rat(0), Rat(1)};  // h_2 = x1^2
  torus::Flow<Rat> flow(skew);
  auto series = mean_attraction_estimate(flow, torus::make_point(std::vector<Rat>{Rat(0), Rat(0)}),
                                         torus::make_point(std::vector<Rat>{Rat(0), Rat(1, 2)}), {64});
  CHECK(series.values.back() == std::complex<double>(0.5, 0.0));
}

// ===========================================================================
// quasi-eigenfunction phases
// ===========================================================================

TEST_CASE("chain_flow builds the unipotent chain matrix") {
  auto f = chain_flow(3, Rat(1, 4));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Int want = (i == j || j == i - 1) ? 1 : 0;
      CHECK(f.A.at(i, j) == want);
    }
  CHECK(f.t[0] == Rat(1, 4));
  CHECK(f.t[1] == Rat(0));
  CHECK(f.t[2] == Rat(0));
  CHECK_THROWS_AS(chain_flow(0, Rat(1)), ConfigError);
}

TEST_CASE("chain_thetas reverses the point and appends alpha") {
  auto theta = chain_thetas(torus::make_point(std::vector<Rat>{Rat(1, 2), Rat(1, 4), Rat(1, 8)}), Rat(1, 16));
  REQUIRE(theta.thetas.size() == 4);
  CHECK(theta.thetas[0] == 0.125);
  CHECK(theta.thetas[1] == 0.25);
  CHECK(theta.thetas[2] == 0.5);
  CHECK(theta.thetas[3] == 0.0625);
}

TEST_CASE("the binomial model matches the exact chain orbit") {
  // d = 1 is the rotation z + n alpha; the model is theta_0 + theta_1 n
  auto z1 = torus::make_point(std::vector<Rat>{Rat(3, 8)});
  auto r1 = quasi_eigen_crosscheck(chain_thetas(z1, Rat(1, 8)), chain_flow(1, Rat(1, 8)), z1, 512);
  CHECK(r1.max_deviation < 1e-14);

  // d = 3 with dyadic data: both routes reduce exactly
  auto z3 = torus::make_point(std::vector<Rat>{Rat(1, 2), Rat(1, 4), Rat(1, 16)});
  auto r3 =
      quasi_eigen_crosscheck(chain_thetas(z3, Rat(1, 8)), chain_flow(3, Rat(1, 8)), z3, 2000);
  CHECK(r3.max_deviation < 1e-13);

  // non-dyadic inputs snapped to doubles still agree: C(n,3) ~ 5e8 would
  // amplify any representation gap between the two routes
  Rat alpha = rat_from_double(1.0 / 3.0);
  auto zs = torus::make_point(std::vector<Rat>{rat_from_double(0.7071), Rat(0), rat_from_double(0.123)});
  auto rs = quasi_eigen_crosscheck(chain_thetas(zs, alpha), chain_flow(3, alpha), zs, 1500);
  CHECK(rs.max_deviation < 1e-12);
  CHECK(rs.argmax_n >= 1);
}

TEST_CASE("the crosscheck rejects flows that are not the chain map") {
  auto z = torus::make_point(std::vector<Rat>{Rat(0), Rat(0)});
  auto theta = chain_thetas(z, Rat(1, 8));

  auto skewed = chain_flow(2, Rat(1, 8));
  skewed.A.at(0, 1) = 1;
  CHECK_THROWS_AS(quasi_eigen_crosscheck(theta, skewed, z, 10), ConfigError);

  auto shifted = chain_flow(2, Rat(1, 8));
  shifted.t[1] = Rat(1, 3);
  CHECK_THROWS_AS(quasi_eigen_crosscheck(theta, shifted, z, 10), ConfigError);

  auto wrong_dim = torus::make_point(std::vector<Rat>{Rat(0)});
  CHECK_THROWS_AS(quasi_eigen_crosscheck(theta, chain_flow(2, Rat(1, 8)), wrong_dim, 10),
                  ConfigError);
}
