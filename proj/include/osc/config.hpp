// config.hpp
//
// Experiment configuration, two layers:
//
//   KeyValueConfig  line-oriented `key = value` text.  Values stay strings
//                   until a typed getter asks for them, so numeric inputs are
//                   parsed exactly once by our own rational grammar and never
//                   round-trip through a float.  Getters mark keys consumed;
//                   reject_unknown() then names anything left over, which
//                   catches typos instead of silently ignoring them.
//
//   FlowSpec        a torus flow description file: map type, dimension,
//                   translation, triangular coefficients, fiber polynomials,
//                   optional start point.  Parsed over exact rationals; a
//                   converter produces the BigFloat twin for long orbits.
//
// Flow file keys by type:
//
//   type = affine | simple_skew | general_skew
//   d = 3                       dimension (all types)
//   A = 1 0 0; 1 1 0; 0 1 1     integer matrix rows (affine)
//   t = 1/8, 0, 0               translation vector (affine)
//   k = 2                       fiber degree bound (skews)
//   a = 1/4                     base rotation (skews)
//   b_3_2 = 5                   triangular integer coefficient (simple skew)
//   h_2 = 0, 0, 1               h_i as coefficients, constant first (simple)
//   h_3 = 1,1:1 | 0,2:1/4       h_i as `exponents:coeff` terms (general)
//   x0 = 0, 1/2, 0              optional start lift, defaults to the origin

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "osc/numeric.hpp"
#include "osc/torus.hpp"

namespace osc::config {

std::string trim(std::string_view s);
// Splits on `sep`, trims each piece; empty pieces are errors.
std::vector<std::string> split(const std::string& s, char sep);

class KeyValueConfig {
 public:
  static KeyValueConfig parse_text(const std::string& text, std::string origin = "<text>");
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  std::vector<std::string> keys() const;

  // Required unless a fallback is supplied; all getters mark the key consumed.
  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::uint64_t get_u64(const std::string& key);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  int get_int(const std::string& key);
  int get_int(const std::string& key, int fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  Rat get_rat(const std::string& key);
  Rat get_rat(const std::string& key, const Rat& fallback);
  bool get_bool(const std::string& key, bool fallback);
  // Comma-separated rationals.
  std::vector<Rat> get_rat_list(const std::string& key);
  std::vector<Rat> get_rat_list(const std::string& key, const std::vector<Rat>& fallback);
  std::vector<std::uint64_t> get_u64_list(const std::string& key);
  std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                          const std::vector<std::uint64_t>& fallback);

  // Throws ConfigError naming every key no getter has touched.
  void reject_unknown() const;

  const std::string& origin() const { return origin_; }

 private:
  std::string raw(const std::string& key);  // consume + fetch, throws if absent

  std::map<std::string, std::string> kv_;
  std::set<std::string> consumed_;
  std::string origin_;
};

// ===========================================================================
// flow descriptions
// ===========================================================================

struct FlowSpec {
  torus::Flow<Rat> flow;
  std::vector<Rat> x0;  // start lift, same length as the flow dimension
};

FlowSpec parse_flow_text(const std::string& text, const std::string& origin = "<text>");
FlowSpec load_flow(const std::string& path);

torus::Flow<BigFloat> flow_to_bigfloat(const torus::Flow<Rat>& f, long prec);
std::vector<BigFloat> point_to_bigfloat(const std::vector<Rat>& v, long prec);

// Observable: `k_1,...,k_dim:re` or `k_1,...,k_dim:re,im` terms joined by
// '|'; coefficients are decimal, duplicate character indices accumulate.
torus::TrigPolynomial parse_trigpoly(const std::string& s, int dim);

// `r11 r12; r21 r22` integer matrix, rows ';'-separated; must come out
// square, the dimension is inferred from the row count.
torus::IMat parse_square_imat(const std::string& s, const std::string& origin = "<text>");

}  // namespace osc::config
