// Sequence sources: Mobius sieve against a factorization oracle, the
// high-precision frac(alpha beta^n g(beta)) stream against the exact rational
// value, file loading, and the growth-condition certificate.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "osc/numeric.hpp"
#include "osc/seqgen.hpp"

using namespace osc;
using namespace osc::seqgen;

namespace {

// trial-division Mobius, the independent oracle
int brute_mu(std::uint64_t n) {
  int r = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    ++r;
  }
  if (n > 1) ++r;
  return r % 2 ? -1 : 1;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

}  // namespace

// ===========================================================================
// Mobius
// ===========================================================================

TEST_CASE("sieve equals trial-division factorization up to 1e4") {
  auto mu = mobius_sieve(10'000);
  REQUIRE(mu.size() == 10'001);
  CHECK(mu[1] == 1);
  CHECK(mu[2] == -1);
  CHECK(mu[4] == 0);
  CHECK(mu[6] == 1);
  CHECK(mu[30] == -1);
  for (std::uint64_t n = 1; n <= 10'000; ++n) CHECK(mu[n] == brute_mu(n));
}

TEST_CASE("Mobius is multiplicative on coprime pairs") {
  auto mu = mobius_sieve(10'000);
  std::mt19937_64 rng(77);
  int checked = 0;
  while (checked < 500) {
    std::uint64_t m = 2 + rng() % 9'999;
    std::uint64_t n = 2 + rng() % 9'999;
    if (gcd_u64(m, n) != 1) continue;
    CHECK(brute_mu(m * n) == mu[m] * mu[n]);
    ++checked;
  }
}

TEST_CASE("Mertens sums match the classical table") {
  auto mu = mobius_sieve(100'000);
  long m = 0;
  std::uint64_t next_check = 10;
  const long expected[] = {-1, 1, 2, -23, -48};  // at 10^1..10^5
  std::size_t at = 0;
  for (std::uint64_t n = 1; n <= 100'000; ++n) {
    m += mu[n];
    if (n == next_check) {
      CHECK(m == expected[at]);
      ++at;
      next_check *= 10;
    }
  }
}

TEST_CASE("MobiusSequence exposes the sieve through the cursor interface") {
  MobiusSequence seq(200);
  CHECK(seq.length() == 200);
  CHECK_FALSE(seq.unimodular());
  CHECK(seq.mu(1) == 1);
  CHECK(seq.mu(12) == 0);

  auto cur = seq.cursor(1);
  for (std::uint64_t n = 1; n <= 200; ++n)
    CHECK(cur->next() == std::complex<double>(seq.mu(n), 0.0));

  auto tail = seq.cursor(150);
  CHECK(tail->next() == std::complex<double>(seq.mu(150), 0.0));

  auto skipping = seq.cursor(1);
  skipping->skip(99);
  CHECK(skipping->next() == std::complex<double>(seq.mu(100), 0.0));

  CHECK_THROWS_AS(seq.mu(0), ConfigError);
  CHECK_THROWS_AS(seq.mu(201), ConfigError);
  CHECK_THROWS_AS(seq.cursor(0), ConfigError);
}

// ===========================================================================
// frac(alpha beta^n g(beta)) kernel
// ===========================================================================

TEST_CASE("ExpBetaSpec validation rejects out-of-domain parameters") {
  ExpBetaSpec spec;
  spec.alpha = Rat(1);
  spec.beta = Rat(2);
  spec.g = {Rat(1)};
  spec.n_max = 10;
  CHECK_NOTHROW(spec.validate());

  auto bad = spec;
  bad.alpha = Rat(0);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.beta = Rat(1);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.g = {Rat(1), Rat(-1)};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.g = {Rat(0)};
  CHECK_THROWS_AS(bad.validate(), ConfigError);  // g(beta) must be positive
  bad = spec;
  bad.n_max = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("integer beta powers have zero fractional part") {
  ExpBetaSpec spec;
  spec.alpha = Rat(1);
  spec.beta = Rat(2);
  spec.g = {Rat(1)};
  spec.n_max = 60;
  FracStream fs(spec);
  for (int n = 1; n <= 60; ++n) CHECK(fs.next_frac() == 0.0);
}

TEST_CASE("alpha=1/3, beta=2 cycles through thirds") {
  ExpBetaSpec spec;
  spec.alpha = Rat(1, 3);
  spec.beta = Rat(2);
  spec.g = {Rat(1)};
  spec.n_max = 40;
  FracStream fs(spec);
  for (int n = 1; n <= 40; ++n) {
    double expect = n % 2 ? 2.0 / 3.0 : 1.0 / 3.0;  // 2^n mod 3 alternates 2, 1
    CHECK(fs.next_frac() == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("kernel output equals the exact rational value across re-derivations") {
  PrecisionPolicy policy;
  policy.rederive_every = 16;  // force many re-derivations inside 300 steps

  ExpBetaSpec spec;
  spec.alpha = Rat(3, 7);
  spec.beta = Rat(3, 2);
  spec.g = {Rat(1, 2), Rat(2)};  // g(x) = 1/2 + 2x, so scale = 3/7 * 7/2 = 3/2
  spec.n_max = 300;
  spec.policy = policy;
  CHECK(spec.scale() == Rat(3, 2));

  FracStream fs(spec);
  Rat scale = spec.scale();
  for (unsigned long n = 1; n <= 300; ++n) {
    CHECK(fs.current_n() == n);
    double got = fs.next_frac();
    double expect = to_double(mod1(Rat(scale * rat_pow(spec.beta, n))));
    CHECK(std::abs(got - expect) < 1e-15);
  }
  CHECK_THROWS_AS(fs.next_frac(), ConfigError);  // past n_max
}

TEST_CASE("kernel-precision output refines the double output") {
  ExpBetaSpec spec;
  spec.alpha = Rat(1);
  spec.beta = Rat(3, 2);
  spec.g = {Rat(1)};
  spec.n_max = 120;
  FracStream wide(spec);
  FracStream narrow(spec);
  for (int n = 1; n <= 120; ++n) {
    BigFloat b = wide.next_frac_big();
    double d = narrow.next_frac();
    CHECK(std::abs(to_double(b) - d) < 1e-15);
  }
}

TEST_CASE("precision ceiling is enforced up front") {
  ExpBetaSpec spec;
  spec.alpha = Rat(1);
  spec.beta = Rat(2);
  spec.g = {Rat(1)};
  spec.n_max = 1'000'000;  // needs ~1e6 bits
  spec.policy.ceiling_bits = 4096;
  try {
    FracStream fs(spec);
    FAIL("expected PrecisionBudgetError");
  } catch (const PrecisionBudgetError& e) {
    CHECK(e.required_bits > e.ceiling_bits);
    CHECK(e.ceiling_bits == 4096);
  }
}

TEST_CASE("bits_for grows monotonically with the horizon") {
  PrecisionPolicy policy;
  Rat beta(3, 2);
  Rat scale(5, 4);
  long prev = 0;
  for (std::uint64_t n = 1; n <= 4096; n *= 2) {
    long bits = policy.bits_for(n, beta, scale);
    CHECK(bits >= prev);
    prev = bits;
  }
  CHECK(policy.bits_for(1024, beta, scale) >= 1024 * 0.58);  // n log2(3/2) leading bits
}

TEST_CASE("ExpBetaSequence terms are the phases of the stream") {
  ExpBetaSpec spec;
  spec.alpha = Rat(1, 3);
  spec.beta = Rat(3, 2);
  spec.g = {Rat(1)};
  spec.n_max = 80;

  ExpBetaSequence seq(spec);
  CHECK(seq.unimodular());
  CHECK(seq.length() == 80);

  FracStream fs(spec);
  auto cur = seq.cursor(1);
  for (int n = 1; n <= 80; ++n) {
    auto z = cur->next();
    CHECK(std::abs(z - e2pi(fs.next_frac())) < 1e-14);
    CHECK(std::abs(std::abs(z) - 1.0) < 1e-14);
  }

  // a cursor opened mid-sequence agrees with the skipped-along one
  auto mid = seq.cursor(41);
  FracStream fs2(spec);
  for (int n = 1; n <= 40; ++n) fs2.next_frac();
  CHECK(std::abs(mid->next() - e2pi(fs2.next_frac())) < 1e-14);
}

// ===========================================================================
// synthetic and file-backed sequences
// ===========================================================================

TEST_CASE("synthetic sequence walks the phase polynomial") {
  SyntheticSequence seq(PhasePolynomial({0.0, 0.25}));  // p(n) = n/4
  CHECK(seq.unimodular());
  auto cur = seq.cursor(1);
  CHECK(std::abs(cur->next() - std::complex<double>(0, 1)) < 1e-14);
  CHECK(std::abs(cur->next() - std::complex<double>(-1, 0)) < 1e-14);
  CHECK(std::abs(cur->next() - std::complex<double>(0, -1)) < 1e-14);
  CHECK(std::abs(cur->next() - std::complex<double>(1, 0)) < 1e-14);

  auto mid = seq.cursor(6);
  CHECK(std::abs(mid->next() - e2pi(phase_mod1(seq.poly(), 6))) < 1e-14);

  SyntheticSequence capped(PhasePolynomial({0.0, 0.5}), 3);
  auto c = capped.cursor(1);
  c->next();
  c->next();
  c->next();
  CHECK_THROWS_AS(c->next(), ConfigError);
}

TEST_CASE("load_sequence parses pairs, phases, comments and n0") {
  TempFile f("osc_seq_ok.txt",
             "# demo sequence\n"
             "# n0=3\n"
             "1,0\n"
             "  0 , 1 \n"
             "phase:0.5\n"
             "\n"
             "-0.5,-0.5\n");
  auto seq = load_sequence(f.str());
  CHECK(seq->kind() == SeqKind::from_file);
  CHECK(seq->length() == 6);  // n0=3 plus four terms
  CHECK_FALSE(seq->unimodular());

  auto cur = seq->cursor(3);
  CHECK(cur->next() == std::complex<double>(1, 0));
  CHECK(cur->next() == std::complex<double>(0, 1));
  CHECK(std::abs(cur->next() - std::complex<double>(-1, 0)) < 1e-14);
  CHECK(cur->next() == std::complex<double>(-0.5, -0.5));
  CHECK_THROWS_AS(cur->next(), ConfigError);
  CHECK_THROWS_AS(seq->cursor(2), ConfigError);  // before n0
}

TEST_CASE("load_sequence flags unimodular inputs") {
  TempFile f("osc_seq_uni.txt", "1,0\n-1,0\n1,0\n-1,0\n");
  auto seq = load_sequence(f.str());
  CHECK(seq->unimodular());
  auto cur = seq->cursor(1);
  for (int n = 1; n <= 4; ++n)
    CHECK(cur->next() == std::complex<double>(n % 2 ? 1 : -1, 0));
}

TEST_CASE("load_sequence rejects malformed input with the line number") {
  TempFile empty("osc_seq_empty.txt", "# only a comment\n");
  CHECK_THROWS_AS(load_sequence(empty.str()), ParseError);

  TempFile junk("osc_seq_junk.txt", "1,0\nnot-a-term\n");
  try {
    load_sequence(junk.str());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  TempFile nan("osc_seq_nan.txt", "nan,0\n");
  CHECK_THROWS_AS(load_sequence(nan.str()), ParseError);

  TempFile inf("osc_seq_inf.txt", "phase:inf\n");
  CHECK_THROWS_AS(load_sequence(inf.str()), ParseError);

  CHECK_THROWS_AS(load_sequence("/nonexistent/osc_seq.txt"), ParseError);
}

// ===========================================================================
// growth condition
// ===========================================================================

TEST_CASE("unimodular sequences certify c_bound exactly 1") {
  SyntheticSequence seq(PhasePolynomial({0.0, 0.37, 0.11}), 5'000);
  for (double lambda : {1.5, 2.0, 3.0}) {
    auto cert = check_growth_condition(seq, lambda, 5'000);
    CHECK(cert.c_bound == 1.0);
    CHECK_FALSE(cert.divergence_flagged);
    CHECK(cert.lambda == lambda);
  }
}

TEST_CASE("Mobius growth averages never exceed the first term") {
  MobiusSequence seq(50'000);
  auto cert = check_growth_condition(seq, 2.0, 50'000);
  CHECK(cert.c_bound <= 1.0);
  CHECK(cert.c_bound > 0.6);  // squarefree density keeps it near 6/pi^2
  CHECK_FALSE(cert.divergence_flagged);
}

TEST_CASE("linearly growing terms trip the divergence flag") {
  std::vector<std::complex<double>> terms;
  for (int n = 1; n <= 64; ++n) terms.emplace_back(n, 0.0);
  FileSequence seq(std::move(terms), 1, "ramp");
  auto cert = check_growth_condition(seq, 2.0, 64, 8);
  CHECK(cert.divergence_flagged);
  CHECK(cert.c_bound == doctest::Approx(65.0 * 129.0 / 6.0));  // (1/64) * 64*65*129/6
}

TEST_CASE("growth checker validates its inputs") {
  MobiusSequence seq(100);
  CHECK_THROWS_AS(check_growth_condition(seq, 1.0, 100), ConfigError);
  CHECK_THROWS_AS(check_growth_condition(seq, 2.0, 101), ConfigError);
}
