// report.hpp
//
// Deterministic text emission.  All doubles print through one %.17g
// formatter (shortest round-trippable form is not needed; a fixed format
// keeps reports byte-identical across runs and worker counts), rationals
// print as p/q, and CSV rows are assembled with minimal quoting.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "osc/numeric.hpp"

namespace osc::report {

std::string fmt(double v);
std::string fmt(const Rat& v);
std::string fmt(std::uint64_t v);
std::string verdict(bool pass);               // "pass" / "fail"
std::string csv_escape(std::string_view field);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& row(const std::vector<std::string>& fields);  // width-checked
  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }
  void save(const std::string& path) const;

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& text);

}  // namespace osc::report
