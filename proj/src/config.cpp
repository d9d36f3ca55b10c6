#include "osc/config.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace osc::config {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    std::string piece = trim(std::string_view(s).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start));
    if (piece.empty()) throw ParseError("empty element in list '" + s + "'");
    out.push_back(std::move(piece));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace {

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return !std::isdigit(static_cast<unsigned char>(k.front()));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, std::string origin) {
  KeyValueConfig cfg;
  cfg.origin_ = std::move(origin);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    auto where = [&] { return cfg.origin_ + ":" + std::to_string(lineno); };
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(where() + ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!valid_key(key)) throw ParseError(where() + ": bad key '" + key + "'");
    if (value.empty()) throw ParseError(where() + ": empty value for '" + key + "'");
    if (!cfg.kv_.emplace(key, value).second)
      throw ParseError(where() + ": duplicate key '" + key + "'");
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  out.reserve(kv_.size());
  for (const auto& [k, v] : kv_) out.push_back(k);
  return out;
}

std::string KeyValueConfig::raw(const std::string& key) {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  consumed_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) { return raw(key); }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
  return has(key) ? raw(key) : fallback;
}

namespace {

std::uint64_t parse_u64(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ": expected unsigned integer, got '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ": expected integer, got '" + s + "'");
  }
}

}  // namespace

std::uint64_t KeyValueConfig::get_u64(const std::string& key) {
  return parse_u64(raw(key), origin_ + " key '" + key + "'");
}
std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) {
  return has(key) ? get_u64(key) : fallback;
}
int KeyValueConfig::get_int(const std::string& key) {
  return parse_int(raw(key), origin_ + " key '" + key + "'");
}
int KeyValueConfig::get_int(const std::string& key, int fallback) {
  return has(key) ? get_int(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) {
  // routed through the exact rational grammar so "0.1" and "1/10" agree
  return to_double(get_rat(key));
}
double KeyValueConfig::get_double(const std::string& key, double fallback) {
  return has(key) ? get_double(key) : fallback;
}

Rat KeyValueConfig::get_rat(const std::string& key) {
  try {
    return parse_rational(raw(key));
  } catch (const ParseError& e) {
    throw ParseError(origin_ + " key '" + key + "': " + e.what());
  }
}
Rat KeyValueConfig::get_rat(const std::string& key, const Rat& fallback) {
  return has(key) ? get_rat(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(origin_ + " key '" + key + "': expected boolean, got '" + v + "'");
}

std::vector<Rat> KeyValueConfig::get_rat_list(const std::string& key) {
  std::vector<Rat> out;
  for (const auto& piece : split(raw(key), ',')) {
    try {
      out.push_back(parse_rational(piece));
    } catch (const ParseError& e) {
      throw ParseError(origin_ + " key '" + key + "': " + e.what());
    }
  }
  return out;
}
std::vector<Rat> KeyValueConfig::get_rat_list(const std::string& key,
                                              const std::vector<Rat>& fallback) {
  return has(key) ? get_rat_list(key) : fallback;
}

std::vector<std::uint64_t> KeyValueConfig::get_u64_list(const std::string& key) {
  std::vector<std::uint64_t> out;
  for (const auto& piece : split(raw(key), ','))
    out.push_back(parse_u64(piece, origin_ + " key '" + key + "'"));
  return out;
}
std::vector<std::uint64_t> KeyValueConfig::get_u64_list(
    const std::string& key, const std::vector<std::uint64_t>& fallback) {
  return has(key) ? get_u64_list(key) : fallback;
}

void KeyValueConfig::reject_unknown() const {
  std::string extra;
  for (const auto& [k, v] : kv_)
    if (!consumed_.count(k)) extra += extra.empty() ? k : ", " + k;
  if (!extra.empty()) throw ConfigError(origin_ + ": unknown keys: " + extra);
}

// ===========================================================================
// flow descriptions
// ===========================================================================

namespace {

torus::IMat parse_imat(const std::string& text, int d, const std::string& origin) {
  std::vector<std::vector<Int>> rows;
  for (const auto& row_text : split(text, ';')) {
    std::vector<Int> row;
    std::istringstream in(row_text);
    std::string tok;
    while (in >> tok) {
      try {
        row.emplace_back(tok);
      } catch (const std::invalid_argument&) {
        throw ParseError(origin + ": bad matrix entry '" + tok + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) != d)
    throw ParseError(origin + ": matrix needs " + std::to_string(d) + " rows");
  torus::IMat a(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d)
      throw ParseError(origin + ": matrix row " + std::to_string(i + 1) + " needs " +
                       std::to_string(d) + " entries");
    for (int j = 0; j < d; ++j)
      a.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return a;
}

// `e1,...,e_m:coeff` terms joined by '|'; m = nvars, all-zero exponents allowed.
torus::MPoly<Rat> parse_mpoly(const std::string& text, std::size_t nvars,
                              const std::string& origin) {
  torus::MPoly<Rat> p;
  p.nvars = nvars;
  for (const auto& term_text : split(text, '|')) {
    std::size_t colon = term_text.rfind(':');
    if (colon == std::string::npos)
      throw ParseError(origin + ": term '" + term_text + "' needs 'exponents:coeff'");
    torus::MTerm<Rat> term;
    for (const auto& e : split(term_text.substr(0, colon), ','))
      term.e.push_back(static_cast<unsigned>(parse_u64(e, origin)));
    if (term.e.size() != nvars)
      throw ParseError(origin + ": term '" + term_text + "' needs " + std::to_string(nvars) +
                       " exponents");
    term.coeff = parse_rational(trim(term_text.substr(colon + 1)));
    p.terms.push_back(std::move(term));
  }
  return p;
}

}  // namespace

torus::IMat parse_square_imat(const std::string& s, const std::string& origin) {
  int d = static_cast<int>(split(s, ';').size());
  return parse_imat(s, d, origin);
}

FlowSpec parse_flow_text(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg = KeyValueConfig::parse_text(text, origin);
  std::string type = cfg.get_string("type");
  int d = cfg.get_int("d");
  if (d < 1) throw ConfigError(origin + ": d must be >= 1");

  FlowSpec spec;
  if (type == "affine") {
    torus::AffineMap<Rat> f;
    f.A = parse_imat(cfg.get_string("A"), d, origin);
    f.t = cfg.get_rat_list("t");
    spec.flow = std::move(f);
  } else if (type == "simple_skew") {
    torus::SimplePolySkew<Rat> f;
    f.d = d;
    f.k = cfg.get_int("k");
    f.a = cfg.get_rat("a");
    f.b.assign(static_cast<std::size_t>(d) + 1, std::vector<Rat>(static_cast<std::size_t>(d) + 1, Rat(0)));
    f.h.assign(static_cast<std::size_t>(d) + 1, torus::Poly1<Rat>{});
    for (const auto& key : cfg.keys()) {
      if (key.rfind("b_", 0) == 0) {
        auto parts = split(key.substr(2), '_');
        if (parts.size() != 2) throw ConfigError(origin + ": bad coefficient key '" + key + "'");
        int i = parse_int(parts[0], origin), j = parse_int(parts[1], origin);
        if (i < 3 || i > d || j < 2 || j > i - 1)
          throw ConfigError(origin + ": coefficient " + key + " outside 3<=i<=d, 2<=j<=i-1");
        f.b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cfg.get_rat(key);
      } else if (key.rfind("h_", 0) == 0) {
        int i = parse_int(key.substr(2), origin);
        if (i < 2 || i > d) throw ConfigError(origin + ": " + key + " outside 2<=i<=d");
        f.h[static_cast<std::size_t>(i)].c = cfg.get_rat_list(key);
      }
    }
    spec.flow = std::move(f);
  } else if (type == "general_skew") {
    torus::GeneralPolySkew<Rat> f;
    f.d = d;
    f.k = cfg.get_int("k");
    f.a = cfg.get_rat("a");
    f.h.assign(static_cast<std::size_t>(d) + 1, torus::MPoly<Rat>{});
    for (int i = 2; i <= d; ++i)
      f.h[static_cast<std::size_t>(i)].nvars = static_cast<std::size_t>(i) - 1;
    for (const auto& key : cfg.keys()) {
      if (key.rfind("h_", 0) != 0) continue;
      int i = parse_int(key.substr(2), origin);
      if (i < 2 || i > d) throw ConfigError(origin + ": " + key + " outside 2<=i<=d");
      f.h[static_cast<std::size_t>(i)] =
          parse_mpoly(cfg.get_string(key), static_cast<std::size_t>(i) - 1, origin);
    }
    spec.flow = std::move(f);
  } else {
    throw ConfigError(origin + ": unknown flow type '" + type + "'");
  }

  spec.x0 = cfg.get_rat_list("x0", std::vector<Rat>(static_cast<std::size_t>(d), Rat(0)));
  if (static_cast<int>(spec.x0.size()) != d)
    throw ConfigError(origin + ": x0 needs " + std::to_string(d) + " entries");
  cfg.reject_unknown();
  torus::validate_flow(spec.flow);
  return spec;
}

FlowSpec load_flow(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open flow description: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_flow_text(buf.str(), path);
}

// ===========================================================================
// scalar conversion
// ===========================================================================

namespace {

torus::Poly1<BigFloat> poly_to_bigfloat(const torus::Poly1<Rat>& p, long prec) {
  torus::Poly1<BigFloat> out;
  out.c.reserve(p.c.size());
  for (const auto& c : p.c) out.c.push_back(BigFloat::from_rat(c, prec));
  return out;
}

}  // namespace

std::vector<BigFloat> point_to_bigfloat(const std::vector<Rat>& v, long prec) {
  std::vector<BigFloat> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(BigFloat::from_rat(r, prec));
  return out;
}

torus::Flow<BigFloat> flow_to_bigfloat(const torus::Flow<Rat>& f, long prec) {
  if (const auto* a = std::get_if<torus::AffineMap<Rat>>(&f)) {
    torus::AffineMap<BigFloat> g;
    g.A = a->A;
    g.t = point_to_bigfloat(a->t, prec);
    return g;
  }
  if (const auto* s = std::get_if<torus::SimplePolySkew<Rat>>(&f)) {
    torus::SimplePolySkew<BigFloat> g;
    g.d = s->d;
    g.k = s->k;
    g.a = BigFloat::from_rat(s->a, prec);
    g.b.reserve(s->b.size());
    for (const auto& row : s->b) g.b.push_back(point_to_bigfloat(row, prec));
    g.h.reserve(s->h.size());
    for (const auto& p : s->h) g.h.push_back(poly_to_bigfloat(p, prec));
    return g;
  }
  const auto& gs = std::get<torus::GeneralPolySkew<Rat>>(f);
  torus::GeneralPolySkew<BigFloat> g;
  g.d = gs.d;
  g.k = gs.k;
  g.a = BigFloat::from_rat(gs.a, prec);
  g.h.reserve(gs.h.size());
  for (const auto& p : gs.h) {
    torus::MPoly<BigFloat> q;
    q.nvars = p.nvars;
    q.terms.reserve(p.terms.size());
    for (const auto& t : p.terms)
      q.terms.push_back({t.e, BigFloat::from_rat(t.coeff, prec)});
    g.h.push_back(std::move(q));
  }
  return g;
}

torus::TrigPolynomial parse_trigpoly(const std::string& s, int dim) {
  if (dim <= 0) throw ConfigError("observable dimension must be positive");
  torus::TrigPolynomial out;
  for (const auto& term : split(s, '|')) {
    auto colon = term.rfind(':');
    if (colon == std::string::npos)
      throw ParseError("observable term '" + term + "': expected 'indices:coeff'");
    auto idx_toks = split(term.substr(0, colon), ',');
    if (idx_toks.size() != static_cast<std::size_t>(dim))
      throw ParseError("observable term '" + term + "': expected " + std::to_string(dim) +
                       " character indices, got " + std::to_string(idx_toks.size()));
    torus::CharacterIndex idx;
    for (const auto& tok : idx_toks) {
      try {
        std::size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        idx.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("observable term '" + term + "': bad index '" + tok + "'");
      }
    }
    auto coeff_toks = split(term.substr(colon + 1), ',');
    if (coeff_toks.size() > 2)
      throw ParseError("observable term '" + term + "': coefficient is 're' or 're,im'");
    double re = 0.0, im = 0.0;
    try {
      std::size_t used = 0;
      re = std::stod(coeff_toks[0], &used);
      if (used != coeff_toks[0].size()) throw std::invalid_argument(coeff_toks[0]);
      if (coeff_toks.size() == 2) {
        im = std::stod(coeff_toks[1], &used);
        if (used != coeff_toks[1].size()) throw std::invalid_argument(coeff_toks[1]);
      }
    } catch (const std::exception&) {
      throw ParseError("observable term '" + term + "': bad coefficient");
    }
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ParseError("observable term '" + term + "': coefficient not finite");
    out.terms[idx] += std::complex<double>(re, im);
  }
  return out;
}

}  // namespace osc::config
