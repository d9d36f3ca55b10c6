// runner.hpp
//
// The osc-lab command-line surface.  One subcommand per experiment:
//
//   mobius         sieve diagnostics: value counts, squarefree density,
//                  Mertens ratio, growth bound
//   expbeta        stream frac(alpha g(beta) beta^n) to a plottable CSV
//   expand         exact orbit polynomials of a skew flow, with degree-bound
//                  and pointwise-match verdicts
//   weyl           oscillation battery: |(1/N) sum c_n e(P(n))| over sampled
//                  phase polynomials
//   arith          the same battery restricted to progressions n = mk + l
//   disjoint       Cesaro average of c_n * phi(f^n x) along a flow orbit
//   chowla         shifted correlation averages over enumerated patterns
//   koksma         sampled-beta equidistribution experiment
//   mma            running mean of the distance between two orbits
//   qds            binomial-phase crosscheck against the chain map
//   triangularize  unipotent integer conjugation, exact verdicts
//   discrepancy    star discrepancy of a centered grid, both routes
//   accept         the full acceptance suite
//
// Global flags: --config <path>, --out <dir>, --seed <u64>, --threads <n>,
// --precision-ceiling <bits>, --allow-skip, --dry-run.  Every run writes
// report.csv and summary.json into --out; report.csv carries no timing, so
// the same config and seed reproduce it byte for byte.
//
// Exit codes: 0 all verdicts pass, 1 some verdict failed, 2 bad config or
// runtime error.  A precision-budget overflow is exit 2 unless --allow-skip
// turned the affected cells into skips.

#pragma once

namespace osc::runner {

int run(int argc, const char* const* argv);

}  // namespace osc::runner
