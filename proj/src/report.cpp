#include "osc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace osc::report {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Rat& v) { return rat_to_string(v); }

std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::string verdict(bool pass) { return pass ? "pass" : "fail"; }

std::string csv_escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  if (header.empty()) throw ConfigError("csv: header must be nonempty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_escape(header[i]);
  }
  text_ += '\n';
}

Csv& Csv::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw ConfigError("csv: row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_escape(fields[i]);
  }
  text_ += '\n';
  ++rows_;
  return *this;
}

void Csv::save(const std::string& path) const { write_text_file(path, text_); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace osc::report
