#include "osc/seqgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace osc::seqgen {

// ===========================================================================
// Mobius sieve
// ===========================================================================

std::vector<std::int8_t> mobius_sieve(std::uint64_t n_max) {
  if (n_max < 1) throw ConfigError("mobius_sieve: n_max must be >= 1");
  std::vector<std::int8_t> mu(n_max + 1, 0);
  std::vector<std::uint8_t> composite(n_max + 1, 0);
  std::vector<std::uint64_t> primes;
  mu[1] = 1;
  for (std::uint64_t i = 2; i <= n_max; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      mu[i] = -1;
    }
    for (std::uint64_t p : primes) {
      if (p > n_max / i) break;
      composite[i * p] = 1;
      if (i % p == 0) {
        mu[i * p] = 0;  // p^2 divides i*p
        break;
      }
      mu[i * p] = static_cast<std::int8_t>(-mu[i]);
    }
  }
  return mu;
}

namespace {

class MobiusCursor : public TermCursor {
 public:
  MobiusCursor(std::shared_ptr<const std::vector<std::int8_t>> mu, std::uint64_t first_n)
      : mu_(std::move(mu)), n_(first_n) {}
  std::complex<double> next() override {
    if (n_ >= mu_->size()) throw ConfigError("mobius sequence exhausted");
    return {static_cast<double>((*mu_)[n_++]), 0.0};
  }
  void skip(std::uint64_t count) override { n_ += count; }

 private:
  std::shared_ptr<const std::vector<std::int8_t>> mu_;
  std::uint64_t n_;
};

}  // namespace

MobiusSequence::MobiusSequence(std::uint64_t n_max)
    : ComplexSequence(SeqKind::mobius, "mobius", n_max, false),
      mu_(std::make_shared<const std::vector<std::int8_t>>(mobius_sieve(n_max))) {}

int MobiusSequence::mu(std::uint64_t n) const {
  if (n == 0 || n >= mu_->size()) throw ConfigError("mu: index out of range");
  return (*mu_)[n];
}

std::unique_ptr<TermCursor> MobiusSequence::cursor(std::uint64_t first_n) const {
  if (first_n < 1) throw ConfigError("cursor: sequences are 1-indexed");
  return std::make_unique<MobiusCursor>(mu_, first_n);
}

// ===========================================================================
// precision policy / ExpBetaSpec
// ===========================================================================

long PrecisionPolicy::bits_for(std::uint64_t n, const Rat& beta, const Rat& scale) const {
  double lb = std::log2(to_double(beta));
  if (!(lb > 0)) throw ConfigError("bits_for: beta must exceed 1");
  long pow_bits = static_cast<long>(std::ceil(static_cast<double>(n) * lb)) + 1;
  double sc = std::fabs(to_double(scale));
  long scale_bits = static_cast<long>(std::ceil(std::log2(sc + 1.0))) + 1;
  if (scale_bits < 0) scale_bits = 0;
  return pow_bits + scale_bits + guard_bits;
}

Rat ExpBetaSpec::g_at_beta() const {
  Rat acc(0);
  for (std::size_t j = g.size(); j-- > 0;) acc = acc * beta + g[j];
  return acc;
}

Rat ExpBetaSpec::scale() const { return alpha * g_at_beta(); }

void ExpBetaSpec::validate() const {
  if (alpha == 0) throw ConfigError("expbeta: alpha must be nonzero");
  if (!(beta > 1)) throw ConfigError("expbeta: beta must exceed 1");
  if (g.empty()) throw ConfigError("expbeta: g needs at least one coefficient");
  for (const auto& c : g)
    if (c < 0) throw ConfigError("expbeta: g coefficients must be nonnegative");
  if (g_at_beta() <= 0) throw ConfigError("expbeta: g(beta) must be positive");
  if (n_max < 1) throw ConfigError("expbeta: n_max must be >= 1");
}

// ===========================================================================
// FracStream
// ===========================================================================

FracStream::FracStream(const ExpBetaSpec& spec)
    : FracStream((spec.validate(), spec.beta), spec.scale(), spec.n_max, spec.policy) {}

FracStream::FracStream(const Rat& beta, const Rat& scale, std::uint64_t n_max,
                       const PrecisionPolicy& policy)
    : beta_q_(beta), n_max_(n_max), policy_(policy) {
  if (!(beta > 1)) throw ConfigError("FracStream: beta must exceed 1");
  if (n_max < 1) throw ConfigError("FracStream: n_max must be >= 1");
  bits_ = policy.bits_for(n_max, beta, scale) + policy.chain_margin_bits;
  long need = policy.certify ? 2 * bits_ : bits_;
  if (need > policy.ceiling_bits) throw PrecisionBudgetError(need, policy.ceiling_bits);

  beta_f_ = BigFloat::from_rat(beta, bits_);
  scale_f_ = BigFloat::from_rat(scale, bits_);
  pow_ = beta_f_;
  if (policy.certify) {
    beta_f2_ = BigFloat::from_rat(beta, 2 * bits_);
    scale_f2_ = BigFloat::from_rat(scale, 2 * bits_);
    pow2_ = beta_f2_;
  }
}

BigFloat FracStream::emit_and_step() {
  BigFloat frac = (pow_ * scale_f_).frac01();
  if (policy_.certify) {
    BigFloat frac2 = (pow2_ * scale_f2_).frac01();
    double dist = BigFloat::circle_dist(frac, frac2);
    if (dist > 0x1.0p-64)
      throw CertificationError("frac stream certification failed at n=" + std::to_string(n_) +
                               " (disagreement " + std::to_string(dist) + ")");
  }

  ++n_;
  ++since_rederive_;
  if (since_rederive_ >= policy_.rederive_every) {
    since_rederive_ = 0;
    pow_ = BigFloat::pow_ui(beta_f_, static_cast<unsigned long>(n_), bits_);
    if (policy_.certify)
      pow2_ = BigFloat::pow_ui(beta_f2_, static_cast<unsigned long>(n_), 2 * bits_);
  } else {
    pow_ *= beta_f_;
    if (policy_.certify) pow2_ *= beta_f2_;
  }
  return frac;
}

BigFloat FracStream::next_frac_big() {
  if (n_ > n_max_)
    throw ConfigError("FracStream: exhausted (n_max=" + std::to_string(n_max_) + ")");
  return emit_and_step();
}

double FracStream::next_frac() {
  double out = next_frac_big().to_double();
  if (out >= 1.0) out = std::nextafter(1.0, 0.0);  // true value is just below 1
  return out;
}

// ===========================================================================
// ExpBetaSequence
// ===========================================================================

namespace {

class ExpBetaCursor : public TermCursor {
 public:
  ExpBetaCursor(const ExpBetaSpec& spec, std::uint64_t first_n) : stream_(spec) {
    for (std::uint64_t i = 1; i < first_n; ++i) stream_.next_frac();
  }
  std::complex<double> next() override { return e2pi(stream_.next_frac()); }

 private:
  FracStream stream_;
};

}  // namespace

ExpBetaSequence::ExpBetaSequence(ExpBetaSpec spec)
    : ComplexSequence(SeqKind::expbeta, "expbeta", spec.n_max, true), spec_(std::move(spec)) {
  spec_.validate();
}

std::unique_ptr<TermCursor> ExpBetaSequence::cursor(std::uint64_t first_n) const {
  if (first_n < 1) throw ConfigError("cursor: sequences are 1-indexed");
  return std::make_unique<ExpBetaCursor>(spec_, first_n);
}

// ===========================================================================
// SyntheticSequence
// ===========================================================================

namespace {

class SyntheticCursor : public TermCursor {
 public:
  SyntheticCursor(const PhasePolynomial& p, std::uint64_t first_n, std::uint64_t limit)
      : chain_(p, first_n, 1, phasor_resync_interval(p.degree())), limit_(limit) {}
  std::complex<double> next() override {
    if (limit_ && chain_.n() > limit_) throw ConfigError("synthetic sequence exhausted");
    std::complex<double> z = chain_.current();
    chain_.advance();
    return z;
  }

 private:
  PhasorStream chain_;
  std::uint64_t limit_;
};

}  // namespace

SyntheticSequence::SyntheticSequence(PhasePolynomial p, std::uint64_t length, std::string name)
    : ComplexSequence(SeqKind::synthetic, std::move(name),
                      length == 0 ? std::numeric_limits<std::uint64_t>::max() : length, true),
      p_(std::move(p)) {}

std::unique_ptr<TermCursor> SyntheticSequence::cursor(std::uint64_t first_n) const {
  if (first_n < 1) throw ConfigError("cursor: sequences are 1-indexed");
  std::uint64_t limit =
      length_ == std::numeric_limits<std::uint64_t>::max() ? 0 : length_;
  return std::make_unique<SyntheticCursor>(p_, first_n, limit);
}

// ===========================================================================
// FileSequence / load_sequence
// ===========================================================================

namespace {

class FileCursor : public TermCursor {
 public:
  FileCursor(std::shared_ptr<const std::vector<std::complex<double>>> v, std::uint64_t idx0)
      : v_(std::move(v)), i_(idx0) {}
  std::complex<double> next() override {
    if (i_ >= v_->size()) throw ConfigError("file sequence exhausted");
    return (*v_)[i_++];
  }
  void skip(std::uint64_t count) override { i_ += count; }

 private:
  std::shared_ptr<const std::vector<std::complex<double>>> v_;
  std::uint64_t i_;
};

bool nearly_unimodular(const std::vector<std::complex<double>>& v) {
  for (const auto& z : v)
    if (std::fabs(std::abs(z) - 1.0) > 1e-12) return false;
  return true;
}

}  // namespace

FileSequence::FileSequence(std::vector<std::complex<double>> terms, std::uint64_t n0,
                           std::string name)
    : ComplexSequence(SeqKind::from_file, std::move(name),
                      n0 - 1 + terms.size(), nearly_unimodular(terms)),
      terms_(std::make_shared<const std::vector<std::complex<double>>>(std::move(terms))),
      n0_(n0) {}

std::unique_ptr<TermCursor> FileSequence::cursor(std::uint64_t first_n) const {
  if (first_n < n0_)
    throw ConfigError("file sequence starts at n0=" + std::to_string(n0_));
  return std::make_unique<FileCursor>(terms_, first_n - n0_);
}

std::shared_ptr<ComplexSequence> load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sequence file: " + path);

  std::vector<std::complex<double>> terms;
  std::uint64_t n0 = 1;
  bool n0_seen = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string s = line.substr(b, e - b + 1);
    if (s[0] == '#') {
      auto eq = s.find("n0=");
      if (eq != std::string::npos && !n0_seen) {
        try {
          n0 = std::stoull(s.substr(eq + 3));
          n0_seen = true;
        } catch (const std::exception&) {
          fail("bad n0 header");
        }
        if (n0 < 1) fail("n0 must be >= 1");
      }
      continue;
    }
    double re = 0.0, im = 0.0;
    if (s.rfind("phase:", 0) == 0) {
      std::string ph = s.substr(6);
      try {
        std::size_t used = 0;
        double t = std::stod(ph, &used);
        while (used < ph.size() && std::isspace(static_cast<unsigned char>(ph[used]))) ++used;
        if (used != ph.size()) fail("trailing junk after phase");
        if (!std::isfinite(t)) fail("non-finite phase");
        auto z = e2pi(t);
        re = z.real();
        im = z.imag();
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        fail("bad phase value");
      }
    } else {
      auto comma = s.find(',');
      if (comma == std::string::npos) fail("expected `re,im` or `phase:<decimal>`");
      try {
        re = std::stod(s.substr(0, comma));
        im = std::stod(s.substr(comma + 1));
      } catch (const std::exception&) {
        fail("bad complex value");
      }
      if (!std::isfinite(re) || !std::isfinite(im)) fail("non-finite value");
    }
    terms.push_back({re, im});
  }
  if (terms.empty()) throw ParseError(path + ": no terms in sequence file");
  return std::make_shared<FileSequence>(std::move(terms), n0, "file:" + path);
}

// ===========================================================================
// growth condition
// ===========================================================================

GrowthCertificate check_growth_condition(const ComplexSequence& seq, double lambda,
                                         std::uint64_t n_max, std::uint64_t window) {
  if (!(lambda > 1.0)) throw ConfigError("check_growth_condition: lambda must exceed 1");
  if (n_max < 1) throw ConfigError("check_growth_condition: n_max must be >= 1");
  if (n_max > seq.length()) throw ConfigError("check_growth_condition: sequence too short");

  GrowthCertificate cert;
  cert.lambda = lambda;
  cert.n_max = n_max;
  cert.window = window;

  // |c_n| = 1 holds by construction for unimodular sequences, so every
  // Cesaro average of |c_n|^lambda is exactly 1; evaluating the terms would
  // only replace that with 1 +- float noise.
  if (seq.unimodular()) {
    cert.c_bound = 1.0;
    cert.divergence_flagged = false;
    return cert;
  }

  auto cur = seq.cursor(1);
  KahanSum acc;
  double best = 0.0;
  double prev_avg = -1.0;
  std::uint64_t streak = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    acc.add(std::pow(std::abs(cur->next()), lambda));
    double avg = acc.value() / static_cast<double>(n);
    if (avg > best) best = avg;
    if (n > 1 && avg > prev_avg)
      ++streak;
    else if (n > 1)
      streak = 0;
    prev_avg = avg;
  }
  cert.c_bound = best;
  cert.divergence_flagged = window > 0 && streak >= window;
  return cert;
}

}  // namespace osc::seqgen
