#include "osc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "osc/accept.hpp"
#include "osc/averaging.hpp"
#include "osc/config.hpp"
#include "osc/equidist.hpp"
#include "osc/numeric.hpp"
#include "osc/orbitpoly.hpp"
#include "osc/phase.hpp"
#include "osc/report.hpp"
#include "osc/seqgen.hpp"
#include "osc/torus.hpp"

namespace osc::runner {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// ===========================================================================
// run context: global flags, direct flags, config, echo
// ===========================================================================

struct Ctx {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_flag;
  int threads = 1;
  std::optional<long> ceiling_flag;
  bool allow_skip = false;
  bool dry_run = false;

  std::optional<std::string> seq;
  std::optional<std::uint64_t> nmax;
  std::optional<int> degree;
  std::optional<std::string> flow;
  std::optional<std::uint64_t> n_check;
  std::optional<std::uint64_t> grid;

  config::KeyValueConfig cfg;
  json echo = json::object();
  Clock::time_point t0 = Clock::now();

  void note(const std::string& key, const std::string& value) { echo[key] = value; }

  std::uint64_t seed(std::uint64_t dflt = 20260815) {
    std::uint64_t v = cfg.get_u64("seed", dflt);
    if (seed_flag) v = *seed_flag;
    note("seed", report::fmt(v));
    return v;
  }

  seqgen::PrecisionPolicy policy() {
    seqgen::PrecisionPolicy p;
    if (ceiling_flag) p.ceiling_bits = *ceiling_flag;
    return p;
  }
};

// Direct flags override config keys; the config key is still consumed so
// reject_unknown stays quiet.
std::uint64_t u64_or(Ctx& c, const char* key, const std::optional<std::uint64_t>& direct,
                     std::uint64_t dflt) {
  std::uint64_t v = c.cfg.get_u64(key, dflt);
  return direct ? *direct : v;
}

int int_or(Ctx& c, const char* key, const std::optional<int>& direct, int dflt) {
  int v = c.cfg.get_int(key, dflt);
  return direct ? *direct : v;
}

std::string str_or(Ctx& c, const char* key, const std::optional<std::string>& direct,
                   const std::string& dflt) {
  std::string v = c.cfg.get_string(key, dflt);
  return direct ? *direct : v;
}

std::string need_str(Ctx& c, const char* key, const std::optional<std::string>& direct) {
  if (c.cfg.has(key)) {
    std::string v = c.cfg.get_string(key);
    return direct ? *direct : v;
  }
  if (direct) return *direct;
  throw ConfigError(std::string("missing '") + key + "' (config key or direct flag)");
}

std::uint64_t need_u64(Ctx& c, const char* key, const std::optional<std::uint64_t>& direct) {
  if (c.cfg.has(key)) {
    std::uint64_t v = c.cfg.get_u64(key);
    return direct ? *direct : v;
  }
  if (direct) return *direct;
  throw ConfigError(std::string("missing '") + key + "' (config key or direct flag)");
}

std::shared_ptr<seqgen::ComplexSequence> make_sequence(const std::string& spec,
                                                       std::uint64_t need_n) {
  if (spec == "mobius") return std::make_shared<seqgen::MobiusSequence>(need_n);
  return seqgen::load_sequence(spec);
}

void say(const std::string& label, const std::string& status) {
  std::printf("  %-36s %s\n", label.c_str(), status.c_str());
}

bool dry(Ctx& c, const char* command, std::size_t cells) {
  if (!c.dry_run) return false;
  std::printf("dry-run: %s: %zu cells\n", command, cells);
  return true;
}

void finish(Ctx& c, const std::string& command, const report::Csv& csv, std::size_t cells,
            std::size_t passed, std::size_t failed, std::size_t skipped,
            json extra = json::object()) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  csv.save((fs::path(c.out_dir) / "report.csv").string());

  json s;
  s["command"] = command;
  s["config_echo"] = c.echo;
  s["cells"] = cells;
  s["passed"] = passed;
  s["failed"] = failed;
  s["skipped"] = skipped;
  s["wall_time_s"] = std::chrono::duration<double>(Clock::now() - c.t0).count();
  for (auto& [k, v] : extra.items()) s[k] = v;
  report::write_text_file((fs::path(c.out_dir) / "summary.json").string(), s.dump(2) + "\n");

  std::printf("%s: %zu cells, %zu passed, %zu failed, %zu skipped\n", command.c_str(), cells,
              passed, failed, skipped);
}

// ===========================================================================
// mobius: sieve diagnostics
// ===========================================================================

int cmd_mobius(Ctx& c) {
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 1'000'000);
  c.cfg.reject_unknown();
  c.note("nmax", report::fmt(n));
  if (dry(c, "mobius", 6)) return 0;

  seqgen::MobiusSequence seq(n);
  std::uint64_t cm1 = 0, c0 = 0, cp1 = 0;
  long long mertens = 0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    int m = seq.mu(i);
    mertens += m;
    if (m < 0)
      ++cm1;
    else if (m == 0)
      ++c0;
    else
      ++cp1;
  }
  const double density = static_cast<double>(cm1 + cp1) / static_cast<double>(n);
  const double pi = std::acos(-1.0);
  const double expected_density = 6.0 / (pi * pi);
  const double mertens_ratio = std::abs(static_cast<double>(mertens)) / static_cast<double>(n);
  auto growth = seqgen::check_growth_condition(seq, 2.0, n);

  bool density_ok = std::abs(density - expected_density) < 0.01;
  bool mertens_ok = mertens_ratio < 0.01;
  bool growth_ok = growth.c_bound <= 1.0 && !growth.divergence_flagged;

  report::Csv csv({"metric", "value", "expected", "verdict"});
  csv.row({"count_mu_minus1", report::fmt(cm1), "-", "info"});
  csv.row({"count_mu_zero", report::fmt(c0), "-", "info"});
  csv.row({"count_mu_plus1", report::fmt(cp1), "-", "info"});
  csv.row({"squarefree_density", report::fmt(density), "6/pi^2 within 0.01",
           report::verdict(density_ok)});
  csv.row({"mertens_ratio", report::fmt(mertens_ratio), "< 0.01", report::verdict(mertens_ok)});
  csv.row({"growth_bound_lambda2", report::fmt(growth.c_bound), "<= 1",
           report::verdict(growth_ok)});

  say("squarefree_density " + report::fmt(density), report::verdict(density_ok));
  say("mertens_ratio " + report::fmt(mertens_ratio), report::verdict(mertens_ok));
  say("growth_bound_lambda2 " + report::fmt(growth.c_bound), report::verdict(growth_ok));

  std::size_t failed = (!density_ok) + (!mertens_ok) + (!growth_ok);
  finish(c, "mobius", csv, 6, 6 - failed, failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// expbeta: stream fractional parts to a plottable CSV
// ===========================================================================

int cmd_expbeta(Ctx& c) {
  seqgen::ExpBetaSpec spec;
  spec.alpha = c.cfg.get_rat("alpha", Rat(1));
  spec.beta = c.cfg.get_rat("beta");
  spec.g = c.cfg.get_rat_list("g", {Rat(1)});
  spec.n_max = u64_or(c, "nmax", c.nmax, 1000);
  spec.policy = c.policy();
  c.cfg.reject_unknown();
  spec.validate();

  c.note("alpha", rat_to_string(spec.alpha));
  c.note("beta", rat_to_string(spec.beta));
  c.note("nmax", report::fmt(spec.n_max));
  if (dry(c, "expbeta", spec.n_max)) return 0;

  report::Csv csv({"n", "frac"});
  try {
    auto sample = equidist::frac_parts(spec, spec.n_max);
    for (std::size_t i = 0; i < sample.values.size(); ++i)
      csv.row({report::fmt(static_cast<std::uint64_t>(i + 1)), report::fmt(sample.values[i])});
    double disc = equidist::star_discrepancy(sample);
    auto weyl = equidist::weyl_criterion_battery(sample, 8);
    say("star_discrepancy " + report::fmt(disc), "info");
    say("weyl_max_h8 " + report::fmt(weyl.max), "info");
    json extra;
    extra["star_discrepancy"] = report::fmt(disc);
    extra["weyl_max_h8"] = report::fmt(weyl.max);
    finish(c, "expbeta", csv, spec.n_max, spec.n_max, 0, 0, extra);
    return 0;
  } catch (const PrecisionBudgetError& e) {
    if (!c.allow_skip) throw;
    say(std::string("skipped: ") + e.what(), "skipped");
    finish(c, "expbeta", csv, spec.n_max, 0, 0, spec.n_max);
    return 0;
  }
}

// ===========================================================================
// expand: exact orbit polynomials with degree verdicts
// ===========================================================================

int cmd_expand(Ctx& c) {
  const std::string flow_path = need_str(c, "flow", c.flow);
  const std::uint64_t n_check = u64_or(c, "n_check", c.n_check, 50);
  c.cfg.reject_unknown();
  c.note("flow", flow_path);
  c.note("n_check", report::fmt(n_check));

  config::FlowSpec fs = config::load_flow(flow_path);
  const int d = torus::flow_dim(fs.flow);
  if (dry(c, "expand", static_cast<std::size_t>(d))) return 0;

  orbitpoly::OrbitExpansion exp;
  std::string type;
  int k = 0;
  if (const auto* s = std::get_if<torus::SimplePolySkew<Rat>>(&fs.flow)) {
    exp = orbitpoly::expand_orbit_simple(*s, fs.x0);
    type = "simple_skew";
    k = s->k;
  } else if (const auto* g = std::get_if<torus::GeneralPolySkew<Rat>>(&fs.flow)) {
    exp = orbitpoly::expand_orbit_general(*g, fs.x0);
    type = "general_skew";
    k = g->k;
  } else {
    throw ConfigError("expand needs a polynomial skew flow, got an affine map");
  }

  // independent pointwise check against the exact lifted iteration
  std::vector<char> exact(static_cast<std::size_t>(d), 1);
  torus::Orbit<Rat> orbit(fs.flow, torus::make_point(fs.x0));
  for (std::uint64_t n = 0; n <= n_check; ++n) {
    if (n > 0) orbit.advance();
    for (int i = 0; i < d; ++i)
      if (exp.coord[static_cast<std::size_t>(i)].eval_u64(n) !=
          orbit.point().lift[static_cast<std::size_t>(i)])
        exact[static_cast<std::size_t>(i)] = 0;
  }

  report::Csv csv({"coord", "degree", "bound", "exact_to_n", "verdict"});
  json jcoords = json::array();
  std::size_t failed = 0;
  for (int i = 0; i < d; ++i) {
    const auto& p = exp.coord[static_cast<std::size_t>(i)];
    int deg = exp.degree_attained[static_cast<std::size_t>(i)];
    int bound = exp.degree_bound[static_cast<std::size_t>(i)];
    bool ok = deg <= bound && exact[static_cast<std::size_t>(i)];
    failed += !ok;
    std::string deg_s = deg == orbitpoly::RationalPoly::kZeroDegree ? "-inf" : std::to_string(deg);
    csv.row({std::to_string(i + 1), deg_s, std::to_string(bound), report::fmt(n_check),
             report::verdict(ok)});
    say("P_" + std::to_string(i + 1) + " degree " + deg_s + " (bound " + std::to_string(bound) +
            ")",
        report::verdict(ok));

    json jc;
    jc["index"] = i + 1;
    jc["degree"] = deg_s;
    jc["bound"] = bound;
    json coeffs = json::array();
    for (const auto& q : p.coeffs()) coeffs.push_back(rat_to_string(q));
    jc["coefficients"] = coeffs;
    jcoords.push_back(jc);
  }

  json jexp;
  jexp["type"] = type;
  jexp["d"] = d;
  jexp["k"] = k;
  jexp["n_checked"] = n_check;
  jexp["coords"] = jcoords;
  std::filesystem::create_directories(c.out_dir);
  report::write_text_file((std::filesystem::path(c.out_dir) / "expansion.json").string(),
                          jexp.dump(2) + "\n");

  finish(c, "expand", csv, static_cast<std::size_t>(d), static_cast<std::size_t>(d) - failed,
         failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// weyl / arith: oscillation batteries
// ===========================================================================

int cmd_weyl(Ctx& c) {
  const std::string seq_spec = str_or(c, "seq", c.seq, "mobius");
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 100'000);
  const int degree = int_or(c, "degree", c.degree, 2);
  const double threshold = c.cfg.get_double("threshold", 0.02);
  averaging::SamplerConfig sc;
  sc.random_count = c.cfg.get_int("random_count", sc.random_count);
  sc.seed = c.seed(sc.seed);
  c.cfg.reject_unknown();
  c.note("seq", seq_spec);
  c.note("nmax", report::fmt(n));
  c.note("degree", std::to_string(degree));
  c.note("threshold", report::fmt(threshold));

  const std::size_t cells = averaging::sample_phase_polys(degree, sc).size();
  if (dry(c, "weyl", cells)) return 0;

  auto seq = make_sequence(seq_spec, n);
  auto rep = averaging::oscillation_order_test(*seq, degree, sc, {n}, threshold, c.threads);

  report::Csv csv({"poly", "abs_avg", "threshold", "verdict"});
  std::size_t failed = 0;
  for (const auto& r : rep.rows) {
    failed += !r.pass;
    csv.row({r.poly.describe(), report::fmt(r.series.final_abs()), report::fmt(threshold),
             report::verdict(r.pass)});
    say(r.poly.describe() + "  |S| = " + report::fmt(r.series.final_abs()),
        report::verdict(r.pass));
  }
  finish(c, "weyl", csv, rep.rows.size(), rep.rows.size() - failed, failed, 0);
  return failed ? 1 : 0;
}

int cmd_arith(Ctx& c) {
  const std::string seq_spec = str_or(c, "seq", c.seq, "mobius");
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 100'000);
  const int degree = int_or(c, "degree", c.degree, 2);
  const std::uint64_t k_max = c.cfg.get_u64("k_max", 4);
  const double threshold = c.cfg.get_double("threshold", 0.02);
  averaging::SamplerConfig sc;
  sc.random_count = c.cfg.get_int("random_count", sc.random_count);
  sc.seed = c.seed(sc.seed);
  c.cfg.reject_unknown();
  c.note("seq", seq_spec);
  c.note("nmax", report::fmt(n));
  c.note("degree", std::to_string(degree));
  c.note("k_max", report::fmt(k_max));
  c.note("threshold", report::fmt(threshold));

  const std::size_t npoly = averaging::sample_phase_polys(degree, sc).size();
  std::size_t cells = 0;
  for (std::uint64_t k = 1; k <= k_max; ++k) cells += k * npoly;
  if (dry(c, "arith", cells)) return 0;

  auto seq = make_sequence(seq_spec, n);
  auto rep =
      averaging::arithmetic_oscillation_test(*seq, degree, k_max, sc, {n}, threshold, c.threads);

  report::Csv csv({"k", "l", "poly", "abs_avg", "threshold", "verdict"});
  std::size_t failed = 0;
  for (const auto& r : rep.rows) {
    failed += !r.pass;
    csv.row({report::fmt(r.k), report::fmt(r.l), r.poly.describe(),
             report::fmt(r.series.final_abs()), report::fmt(threshold),
             report::verdict(r.pass)});
  }
  say("max |S| over " + std::to_string(rep.rows.size()) + " cells = " +
          report::fmt(rep.max_final),
      report::verdict(rep.all_pass));
  finish(c, "arith", csv, rep.rows.size(), rep.rows.size() - failed, failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// disjoint: Cesaro average along a flow orbit
// ===========================================================================

int cmd_disjoint(Ctx& c) {
  const std::string seq_spec = str_or(c, "seq", c.seq, "mobius");
  const std::string flow_path = need_str(c, "flow", c.flow);
  const std::string obs_spec = c.cfg.get_string("observable");
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 100'000);
  auto checkpoints = c.cfg.get_u64_list("checkpoints", {n});
  const double threshold = c.cfg.get_double("threshold", 0.02);
  c.cfg.reject_unknown();
  c.note("seq", seq_spec);
  c.note("flow", flow_path);
  c.note("observable", obs_spec);
  c.note("threshold", report::fmt(threshold));

  config::FlowSpec fs = config::load_flow(flow_path);
  const int d = torus::flow_dim(fs.flow);
  auto obs = config::parse_trigpoly(obs_spec, d);
  if (dry(c, "disjoint", checkpoints.size())) return 0;

  const std::uint64_t n_last = checkpoints.empty() ? 0 : checkpoints.back();
  auto seq = make_sequence(seq_spec, n_last);

  averaging::CesaroSeries series;
  if (std::holds_alternative<torus::AffineMap<Rat>>(fs.flow)) {
    series = averaging::cesaro_disjointness(*seq, fs.flow, obs, torus::make_point(fs.x0),
                                            checkpoints);
  } else {
    const long prec = torus::recommended_prec(fs.flow, n_last);
    c.note("precision_bits", std::to_string(prec));
    auto bf = config::flow_to_bigfloat(fs.flow, prec);
    series = averaging::cesaro_disjointness(
        *seq, bf, obs, torus::make_point(config::point_to_bigfloat(fs.x0, prec)), checkpoints);
  }

  report::Csv csv({"n", "re", "im", "abs", "threshold", "verdict"});
  std::size_t failed = 0;
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    const bool last = i + 1 == series.checkpoints.size();
    const bool ok = series.magnitude[i] < threshold;
    std::string v = last ? report::verdict(ok) : "info";
    if (last) failed += !ok;
    csv.row({report::fmt(series.checkpoints[i]), report::fmt(series.values[i].real()),
             report::fmt(series.values[i].imag()), report::fmt(series.magnitude[i]),
             report::fmt(threshold), v});
    say("N = " + report::fmt(series.checkpoints[i]) + "  |S| = " +
            report::fmt(series.magnitude[i]),
        v);
  }
  finish(c, "disjoint", csv, series.checkpoints.size(), series.checkpoints.size() - failed,
         failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// chowla: shifted correlation battery
// ===========================================================================

int cmd_chowla(Ctx& c) {
  const std::string seq_spec = str_or(c, "seq", c.seq, "mobius");
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 100'000);
  const int r_max = c.cfg.get_int("r_max", 2);
  const std::uint64_t shift_max = c.cfg.get_u64("shift_max", 3);
  const std::uint64_t expo_max = c.cfg.get_u64("expo_max", 2);
  const double threshold = c.cfg.get_double("threshold", 0.05);
  c.cfg.reject_unknown();
  c.note("seq", seq_spec);
  c.note("nmax", report::fmt(n));
  c.note("threshold", report::fmt(threshold));

  auto patterns = averaging::enumerate_patterns(r_max, static_cast<std::uint32_t>(shift_max),
                                                static_cast<std::uint32_t>(expo_max));
  if (dry(c, "chowla", patterns.size())) return 0;

  auto seq = make_sequence(seq_spec, n + shift_max);
  auto rows = averaging::chowla_test(*seq, patterns, n);

  report::Csv csv({"pattern", "re", "im", "abs", "excluded", "threshold", "verdict"});
  std::size_t failed = 0;
  for (const auto& r : rows) {
    double a = std::abs(r.avg);
    bool ok = a < threshold;
    std::string v = r.excluded ? "info" : report::verdict(ok);
    if (!r.excluded) failed += !ok;
    csv.row({r.pattern.label(), report::fmt(r.avg.real()), report::fmt(r.avg.imag()),
             report::fmt(a), r.excluded ? "1" : "0", report::fmt(threshold), v});
    say(r.pattern.label() + "  |avg| = " + report::fmt(a), v);
  }
  finish(c, "chowla", csv, rows.size(), rows.size() - failed, failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// koksma: sampled-beta equidistribution experiment
// ===========================================================================

std::vector<averaging::ChowlaPattern> parse_patterns(const std::string& s) {
  std::vector<averaging::ChowlaPattern> out;
  for (const auto& part : config::split(s, '|')) {
    auto colon = part.rfind(':');
    if (colon == std::string::npos)
      throw ParseError("pattern '" + part + "': expected 'shifts:exponents'");
    averaging::ChowlaPattern p;
    auto as_u32 = [&part](const std::string& tok) {
      try {
        std::size_t used = 0;
        unsigned long v = std::stoul(tok, &used);
        if (used != tok.size() || v > 0xffffffffUL) throw std::invalid_argument(tok);
        return static_cast<std::uint32_t>(v);
      } catch (const std::exception&) {
        throw ParseError("pattern '" + part + "': bad entry '" + tok + "'");
      }
    };
    for (const auto& tok : config::split(part.substr(0, colon), ','))
      p.shifts.push_back(as_u32(tok));
    for (const auto& tok : config::split(part.substr(colon + 1), ','))
      p.exponents.push_back(as_u32(tok));
    p.validate();
    out.push_back(std::move(p));
  }
  return out;
}

int cmd_koksma(Ctx& c) {
  equidist::KoksmaConfig kc;
  kc.alpha = c.cfg.get_rat("alpha", Rat(1));
  kc.g = c.cfg.get_rat_list("g", {Rat(1)});
  kc.beta_lo = c.cfg.get_double("beta_lo", kc.beta_lo);
  kc.beta_hi = c.cfg.get_double("beta_hi", kc.beta_hi);
  kc.samples = c.cfg.get_int("samples", kc.samples);
  kc.n = u64_or(c, "nmax", c.nmax, kc.n);
  kc.seed = c.seed(kc.seed);
  if (c.cfg.has("patterns")) kc.patterns = parse_patterns(c.cfg.get_string("patterns"));
  kc.thresholds.disc_coeff = c.cfg.get_double("disc_coeff", kc.thresholds.disc_coeff);
  kc.thresholds.weyl_coeff = c.cfg.get_double("weyl_coeff", kc.thresholds.weyl_coeff);
  kc.thresholds.h_max = c.cfg.get_int("h_max", kc.thresholds.h_max);
  const double pf_min = c.cfg.get_double("pass_fraction_min", 0.0);
  kc.policy = c.policy();
  kc.threads = c.threads;
  c.cfg.reject_unknown();
  kc.validate();

  c.note("alpha", rat_to_string(kc.alpha));
  c.note("beta_lo", report::fmt(kc.beta_lo));
  c.note("beta_hi", report::fmt(kc.beta_hi));
  c.note("samples", std::to_string(kc.samples));
  c.note("nmax", report::fmt(kc.n));
  c.note("pass_fraction_min", report::fmt(pf_min));

  const std::size_t cells = static_cast<std::size_t>(kc.samples) * kc.patterns.size();
  if (dry(c, "koksma", cells)) return 0;

  auto kr = equidist::koksma_experiment(kc);

  report::Csv csv({"beta", "pattern", "N", "discrepancy", "weyl_max", "pass"});
  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& r : kr.rows) {
    std::string status = r.skipped ? "skipped" : report::verdict(r.pass);
    if (r.skipped)
      ++skipped;
    else if (r.pass)
      ++passed;
    else
      ++failed;
    csv.row({rat_to_string(r.beta), r.pattern, report::fmt(kr.n), report::fmt(r.discrepancy),
             report::fmt(r.weyl_max), status});
    if (kr.rows.size() <= 32)
      say(rat_to_string(r.beta) + " / " + r.pattern + "  D* = " + report::fmt(r.discrepancy),
          status);
  }
  bool gate = kr.pass_fraction >= pf_min;
  say("pass_fraction = " + report::fmt(kr.pass_fraction) + " (min " + report::fmt(pf_min) + ")",
      report::verdict(gate));

  json extra;
  extra["pass_fraction"] = report::fmt(kr.pass_fraction);
  finish(c, "koksma", csv, kr.rows.size(), passed, failed, skipped, extra);

  if (skipped > 0 && !c.allow_skip) {
    std::fprintf(stderr,
                 "koksma: %zu cells exceeded the precision budget; rerun with --allow-skip or a "
                 "higher --precision-ceiling\n",
                 skipped);
    return 2;
  }
  return gate ? 0 : 1;
}

// ===========================================================================
// mma: running mean of the distance between two orbits
// ===========================================================================

int cmd_mma(Ctx& c) {
  const std::string flow_path = need_str(c, "flow", c.flow);
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 10'000);
  auto checkpoints = c.cfg.get_u64_list("checkpoints", {n});
  auto y0 = c.cfg.get_rat_list("y0");
  c.cfg.reject_unknown();
  c.note("flow", flow_path);

  config::FlowSpec fs = config::load_flow(flow_path);
  if (static_cast<int>(y0.size()) != torus::flow_dim(fs.flow))
    throw ConfigError("y0 needs " + std::to_string(torus::flow_dim(fs.flow)) + " entries");
  if (dry(c, "mma", checkpoints.size())) return 0;

  const std::uint64_t n_last = checkpoints.empty() ? 0 : checkpoints.back();
  averaging::CesaroSeries series;
  if (std::holds_alternative<torus::AffineMap<Rat>>(fs.flow)) {
    series = averaging::mean_attraction_estimate(fs.flow, torus::make_point(fs.x0),
                                                 torus::make_point(y0), checkpoints);
  } else {
    const long prec = torus::recommended_prec(fs.flow, n_last);
    c.note("precision_bits", std::to_string(prec));
    auto bf = config::flow_to_bigfloat(fs.flow, prec);
    series = averaging::mean_attraction_estimate(
        bf, torus::make_point(config::point_to_bigfloat(fs.x0, prec)),
        torus::make_point(config::point_to_bigfloat(y0, prec)), checkpoints);
  }

  report::Csv csv({"n", "mean_distance"});
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    csv.row({report::fmt(series.checkpoints[i]), report::fmt(series.values[i].real())});
    say("N = " + report::fmt(series.checkpoints[i]) + "  mean distance " +
            report::fmt(series.values[i].real()),
        "info");
  }
  finish(c, "mma", csv, series.checkpoints.size(), series.checkpoints.size(), 0, 0);
  return 0;
}

// ===========================================================================
// qds: binomial-phase crosscheck against the chain map
// ===========================================================================

int cmd_qds(Ctx& c) {
  const int d = int_or(c, "d", std::nullopt, 3);
  if (d < 1 || d > 8) throw ConfigError("qds: d must be in 1..8");
  // the binomial-phase model carries its thetas as doubles, so snap the
  // inputs to the nearest dyadic rational; otherwise the representation gap
  // gets amplified by C(n, d) and swamps the crosscheck
  const Rat alpha = rat_from_double(to_double(c.cfg.get_rat("alpha")));
  auto z = c.cfg.get_rat_list("z", std::vector<Rat>(static_cast<std::size_t>(d), Rat(0)));
  for (auto& v : z) v = rat_from_double(to_double(v));
  const std::uint64_t n = u64_or(c, "nmax", c.nmax, 10'000);
  const double tol = c.cfg.get_double("tol", 1e-9);
  c.cfg.reject_unknown();
  if (static_cast<int>(z.size()) != d) throw ConfigError("qds: z needs d entries");
  c.note("d", std::to_string(d));
  c.note("alpha", rat_to_string(alpha));
  c.note("nmax", report::fmt(n));
  if (dry(c, "qds", 1)) return 0;

  auto pt = torus::make_point(z);
  auto res = averaging::quasi_eigen_crosscheck(averaging::chain_thetas(pt, alpha),
                                               averaging::chain_flow(d, alpha), pt, n);
  bool ok = res.max_deviation < tol;

  report::Csv csv({"d", "alpha", "max_deviation", "argmax_n", "tol", "verdict"});
  csv.row({std::to_string(d), rat_to_string(alpha), report::fmt(res.max_deviation),
           report::fmt(res.argmax_n), report::fmt(tol), report::verdict(ok)});
  say("max deviation " + report::fmt(res.max_deviation) + " at n = " +
          report::fmt(res.argmax_n),
      report::verdict(ok));
  finish(c, "qds", csv, 1, ok ? 1 : 0, ok ? 0 : 1, 0);
  return ok ? 0 : 1;
}

// ===========================================================================
// triangularize: unipotent integer conjugation
// ===========================================================================

json imat_to_json(const torus::IMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).get_str());
    rows.push_back(row);
  }
  return rows;
}

int cmd_triangularize(Ctx& c) {
  torus::IMat a = config::parse_square_imat(c.cfg.get_string("a"), c.cfg.origin());
  c.cfg.reject_unknown();
  c.note("a", a.describe());
  if (!torus::is_unipotent(a))
    throw ConfigError("triangularize: the matrix is not unipotent");
  if (dry(c, "triangularize", 2)) return 0;

  torus::IMat p = torus::unipotent_triangularize(a);
  torus::IMat conj = p.inverse_unimodular() * a * p;

  bool det_ok = p.det() == 1;
  bool lower_ok = true;
  for (int i = 0; i < conj.rows(); ++i)
    for (int j = i; j < conj.cols(); ++j)
      if (conj.at(i, j) != ((i == j) ? 1 : 0)) lower_ok = false;

  report::Csv csv({"metric", "value", "verdict"});
  csv.row({"det_p", p.det().get_str(), report::verdict(det_ok)});
  csv.row({"conjugate_lower_unitriangular", lower_ok ? "1" : "0", report::verdict(lower_ok)});
  csv.row({"nilpotency_index", std::to_string(torus::nilpotency_index(a)), "info"});
  say("P = " + p.describe(), report::verdict(det_ok));
  say("P^-1 A P = " + conj.describe(), report::verdict(lower_ok));

  json jout;
  jout["a"] = imat_to_json(a);
  jout["p"] = imat_to_json(p);
  jout["conjugate"] = imat_to_json(conj);
  std::filesystem::create_directories(c.out_dir);
  report::write_text_file((std::filesystem::path(c.out_dir) / "triangularize.json").string(),
                          jout.dump(2) + "\n");

  std::size_t failed = (!det_ok) + (!lower_ok);
  finish(c, "triangularize", csv, 2, 2 - failed, failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// discrepancy: centered grid, both routes
// ===========================================================================

int cmd_discrepancy(Ctx& c) {
  const std::uint64_t n = need_u64(c, "grid", c.grid);
  c.cfg.reject_unknown();
  if (n == 0) throw ConfigError("discrepancy: grid must be positive");
  c.note("grid", report::fmt(n));
  if (dry(c, "discrepancy", 1)) return 0;

  equidist::PointSample1D pts;
  pts.values.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    pts.values.push_back((2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));

  double fast = equidist::star_discrepancy(pts);
  auto weyl = equidist::weyl_criterion_battery(pts, 8);

  report::Csv csv({"metric", "value", "verdict"});
  csv.row({"n", report::fmt(n), "info"});
  csv.row({"star_discrepancy", report::fmt(fast), "info"});
  std::size_t cells = 1, failed = 0;
  if (n <= 5000) {
    double slow = equidist::star_discrepancy_bruteforce(pts);
    bool eq = fast == slow;
    failed += !eq;
    csv.row({"star_discrepancy_bruteforce", report::fmt(slow), "info"});
    csv.row({"routes_agree", eq ? "1" : "0", report::verdict(eq)});
    say("routes_agree", report::verdict(eq));
  }
  csv.row({"weyl_max_h8", report::fmt(weyl.max), "info"});
  say("star_discrepancy " + report::fmt(fast), "info");

  finish(c, "discrepancy", csv, cells, cells - failed, failed, 0);
  return failed ? 1 : 0;
}

// ===========================================================================
// accept: the full acceptance suite
// ===========================================================================

int cmd_accept(Ctx& c) {
  c.cfg.reject_unknown();
  c.note("threads", std::to_string(c.threads));
  if (dry(c, "accept", 12)) return 0;

  auto suite = osc::accept::run_acceptance(c.threads);
  std::filesystem::create_directories(c.out_dir);
  report::write_text_file((std::filesystem::path(c.out_dir) / "report.csv").string(),
                          suite.report_csv);

  std::size_t passed = 0;
  for (const auto& r : suite.criteria) passed += r.pass;
  json s;
  s["command"] = "accept";
  s["config_echo"] = c.echo;
  s["cells"] = suite.criteria.size();
  s["passed"] = passed;
  s["failed"] = suite.criteria.size() - passed;
  s["skipped"] = 0;
  s["wall_time_s"] = std::chrono::duration<double>(Clock::now() - c.t0).count();
  report::write_text_file((std::filesystem::path(c.out_dir) / "summary.json").string(),
                          s.dump(2) + "\n");
  std::printf("accept: %zu cells, %zu passed, %zu failed, 0 skipped\n", suite.criteria.size(),
              passed, suite.criteria.size() - passed);
  return suite.all_pass ? 0 : 1;
}

}  // namespace

// ===========================================================================
// argv surface
// ===========================================================================

int run(int argc, const char* const* argv) {
  Ctx ctx;
  std::string config_path;

  CLI::App app{"osc-lab: oscillating sequences, polynomial torus flows, and beta-power "
               "equidistribution"};
  app.require_subcommand(1);
  app.add_option("--config", config_path, "key = value experiment file");
  app.add_option("--out", ctx.out_dir, "report directory (default .)");
  app.add_option("--seed", ctx.seed_flag, "override the sampler seed");
  app.add_option("--threads", ctx.threads, "worker count, 0 = auto");
  app.add_option("--precision-ceiling", ctx.ceiling_flag, "kernel precision cap in bits");
  app.add_flag("--allow-skip", ctx.allow_skip, "record budget overruns as skips");
  app.add_flag("--dry-run", ctx.dry_run, "validate config, print the cell count, compute nothing");

  struct Sub {
    const char* name;
    const char* desc;
    int (*fn)(Ctx&);
    CLI::App* app = nullptr;
  };
  Sub subs[] = {
      {"mobius", "sieve diagnostics: counts, density, Mertens ratio, growth bound", cmd_mobius},
      {"expbeta", "stream frac(alpha g(beta) beta^n) to CSV", cmd_expbeta},
      {"expand", "exact orbit polynomials with degree verdicts", cmd_expand},
      {"weyl", "oscillation battery over sampled phase polynomials", cmd_weyl},
      {"arith", "oscillation battery over arithmetic progressions", cmd_arith},
      {"disjoint", "Cesaro average of c_n * phi(f^n x) along a flow orbit", cmd_disjoint},
      {"chowla", "shifted correlation battery", cmd_chowla},
      {"koksma", "sampled-beta equidistribution experiment", cmd_koksma},
      {"mma", "running mean of the distance between two orbits", cmd_mma},
      {"qds", "binomial-phase crosscheck against the chain map", cmd_qds},
      {"triangularize", "unipotent integer conjugation", cmd_triangularize},
      {"discrepancy", "star discrepancy of a centered grid, both routes", cmd_discrepancy},
      {"accept", "run the full acceptance suite", cmd_accept},
  };
  for (auto& s : subs) {
    s.app = app.add_subcommand(s.name, s.desc);
    s.app->fallthrough();
  }

  auto with = [&](const char* name) -> CLI::App* {
    for (auto& s : subs)
      if (std::string(name) == s.name) return s.app;
    return nullptr;
  };
  for (const char* name : {"weyl", "arith", "chowla", "disjoint"})
    with(name)->add_option("--seq", ctx.seq, "sequence: 'mobius' or a term file path");
  for (const char* name : {"mobius", "expbeta", "weyl", "arith", "chowla", "disjoint", "koksma",
                           "mma", "qds"})
    with(name)->add_option("--nmax", ctx.nmax, "number of terms");
  for (const char* name : {"weyl", "arith"})
    with(name)->add_option("--degree", ctx.degree, "phase polynomial degree bound");
  for (const char* name : {"expand", "disjoint", "mma"})
    with(name)->add_option("--flow", ctx.flow, "flow description file");
  with("expand")->add_option("--n-check", ctx.n_check, "verify the expansion for n = 0..n_check");
  with("discrepancy")->add_option("--grid", ctx.grid, "centered grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) ctx.cfg = config::KeyValueConfig::parse_file(config_path);
    if (ctx.threads <= 0) {
      unsigned hc = std::thread::hardware_concurrency();
      ctx.threads = static_cast<int>(std::min(hc == 0 ? 1u : hc, 4u));
    }
    for (auto& s : subs)
      if (s.app->parsed()) return s.fn(ctx);
    return 2;
  } catch (const PrecisionBudgetError& e) {
    std::fprintf(stderr, "osc-lab: %s (rerun with --allow-skip or a higher --precision-ceiling)\n",
                 e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "osc-lab: %s\n", e.what());
    return 2;
  }
}

}  // namespace osc::runner
