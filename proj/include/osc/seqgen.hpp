// seqgen.hpp
//
// Sequence sources for the averaging experiments:
//
//   MobiusSequence    mu(n) from a linear (Euler) sieve, O(n_max) time,
//                     one signed byte per entry.
//
//   ExpBetaSequence   c_n = exp(2 pi i frac(alpha * beta^n * g(beta))) with
//                     the fractional parts produced by FracStream, the
//                     high-precision kernel: one MPFR power stream at a
//                     precision chosen by PrecisionPolicy, multiplied up
//                     iteratively and re-derived from scratch every
//                     `rederive_every` steps to bound drift.  When `certify`
//                     is set a shadow stream at twice the precision checks
//                     every emitted fraction to 2^-64; disagreement throws,
//                     it never degrades silently.
//
//   SyntheticSequence c_n = e(2 pi i P(n)) for a real phase polynomial,
//                     evaluated by the exact-reduction path in phase.hpp.
//
//   FileSequence      terms loaded from text (one `re,im` or `phase:<dec>`
//                     per line), unimodularity auto-detected.
//
// All sequences are immutable after construction; cursors are independent,
// so concurrent readers need no locks.  Indexing is 1-based throughout.

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "osc/numeric.hpp"
#include "osc/phase.hpp"

namespace osc::seqgen {

// mu(1..n_max); entry 0 unused.  Linear sieve: each composite is crossed
// exactly once by its smallest prime factor.
std::vector<std::int8_t> mobius_sieve(std::uint64_t n_max);

enum class SeqKind { mobius, expbeta, from_file, synthetic };

class TermCursor {
 public:
  virtual ~TermCursor() = default;
  // Term at the current index, then advance by one.
  virtual std::complex<double> next() = 0;
  // Advance by `count` without producing terms.
  virtual void skip(std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) next();
  }
};

class ComplexSequence {
 public:
  virtual ~ComplexSequence() = default;

  SeqKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  // Largest n the sequence can serve.
  std::uint64_t length() const { return length_; }
  bool unimodular() const { return unimodular_; }
  std::optional<int> claimed_order() const { return claimed_order_; }

  // Cursor positioned at index first_n (>= 1).
  virtual std::unique_ptr<TermCursor> cursor(std::uint64_t first_n = 1) const = 0;

 protected:
  ComplexSequence(SeqKind kind, std::string name, std::uint64_t length, bool unimodular)
      : kind_(kind), name_(std::move(name)), length_(length), unimodular_(unimodular) {}

  SeqKind kind_;
  std::string name_;
  std::uint64_t length_;
  bool unimodular_;
  std::optional<int> claimed_order_;
};

// ===========================================================================
// Mobius
// ===========================================================================

class MobiusSequence : public ComplexSequence {
 public:
  explicit MobiusSequence(std::uint64_t n_max);

  int mu(std::uint64_t n) const;
  std::unique_ptr<TermCursor> cursor(std::uint64_t first_n = 1) const override;

 private:
  std::shared_ptr<const std::vector<std::int8_t>> mu_;
};

// ===========================================================================
// exp(2 pi i alpha beta^n g(beta))
// ===========================================================================

struct PrecisionPolicy {
  long guard_bits = 64;
  // Extra bits absorbing multiplicative drift between re-derivations
  // (~10 bits per 1024-step window measured; 16 leaves slack).
  long chain_margin_bits = 16;
  long ceiling_bits = 1L << 20;
  std::uint64_t rederive_every = 1024;
  bool certify = true;

  // ceil(n log2 beta) + ceil(log2(|scale| + 1)) + guard_bits.  Monotone in n.
  long bits_for(std::uint64_t n, const Rat& beta, const Rat& scale) const;
};

struct ExpBetaSpec {
  Rat alpha;           // nonzero
  Rat beta;            // > 1
  std::vector<Rat> g;  // coefficients of g, constant first, all >= 0
  std::uint64_t n_max = 0;
  PrecisionPolicy policy;

  Rat g_at_beta() const;
  Rat scale() const;  // alpha * g(beta)
  void validate() const;
};

// Streams frac(scale * beta^n) for n = 1, 2, ... as doubles in [0,1).
class FracStream {
 public:
  explicit FracStream(const ExpBetaSpec& spec);
  // Allows a caller-supplied scale (the Koksma experiment folds the pattern
  // combination into one constant G and streams frac(alpha G beta^n)).
  FracStream(const Rat& beta, const Rat& scale, std::uint64_t n_max,
             const PrecisionPolicy& policy);

  double next_frac();       // value for the current n rounded once, then advance
  BigFloat next_frac_big();  // full kernel precision, then advance
  std::uint64_t current_n() const { return n_; }
  long main_bits() const { return bits_; }

 private:
  BigFloat emit_and_step();

  Rat beta_q_;
  std::uint64_t n_max_;
  PrecisionPolicy policy_;
  long bits_;
  std::uint64_t n_ = 1;
  std::uint64_t since_rederive_ = 0;
  BigFloat beta_f_, scale_f_, pow_;           // main precision
  BigFloat beta_f2_, scale_f2_, pow2_;        // shadow at doubled precision
};

class ExpBetaSequence : public ComplexSequence {
 public:
  explicit ExpBetaSequence(ExpBetaSpec spec);
  const ExpBetaSpec& spec() const { return spec_; }
  std::unique_ptr<TermCursor> cursor(std::uint64_t first_n = 1) const override;

 private:
  ExpBetaSpec spec_;
};

// ===========================================================================
// synthetic and file-backed
// ===========================================================================

class SyntheticSequence : public ComplexSequence {
 public:
  // c_n = e(2 pi i p(n)); `length` bounds the usable range (0 = unbounded).
  explicit SyntheticSequence(PhasePolynomial p, std::uint64_t length = 0,
                             std::string name = "synthetic");
  const PhasePolynomial& poly() const { return p_; }
  std::unique_ptr<TermCursor> cursor(std::uint64_t first_n = 1) const override;

 private:
  PhasePolynomial p_;
};

class FileSequence : public ComplexSequence {
 public:
  FileSequence(std::vector<std::complex<double>> terms, std::uint64_t n0, std::string name);
  std::uint64_t first_index() const { return n0_; }
  std::unique_ptr<TermCursor> cursor(std::uint64_t first_n = 1) const override;

 private:
  std::shared_ptr<const std::vector<std::complex<double>>> terms_;
  std::uint64_t n0_;
};

// Text format: one term per line, `re,im` or `phase:<decimal>`; `#` starts a
// comment; an optional header `# n0=<k>` sets the first index (default 1).
// Throws ParseError with the offending line number; non-finite values and
// empty files are rejected.  Unimodularity is detected within 1e-12.
std::shared_ptr<ComplexSequence> load_sequence(const std::string& path);

// ===========================================================================
// growth condition
// ===========================================================================

struct GrowthCertificate {
  double lambda = 2.0;
  double c_bound = 0.0;        // max over N <= n_max of (1/N) sum |c_n|^lambda
  std::uint64_t n_max = 0;
  bool divergence_flagged = false;
  std::uint64_t window = 0;    // streak length that triggers the flag
};

// Running maximum of the Cesaro averages of |c_n|^lambda.  Sequences that
// are unimodular by construction contribute exactly 1 per term, so their
// c_bound is exactly 1 for every lambda.  Divergence is flagged when the
// running average increased strictly at each of the last `window` steps.
GrowthCertificate check_growth_condition(const ComplexSequence& seq, double lambda,
                                         std::uint64_t n_max, std::uint64_t window = 1024);

}  // namespace osc::seqgen
