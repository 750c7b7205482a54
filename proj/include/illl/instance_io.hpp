#pragma once

// Plain-text instance files:
//
//   m n M
//   q_max d_num d_den
//   p_11 ... p_1m
//   ...
//   p_n1 ... p_nm
//
// meaning a_ij = p_ij / 2^M.  Lines starting with '#' and blank lines are
// ignored.

#include "illl/illl.hpp"

#include <string>

namespace illl {

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses and validates an instance.  Throws ParseError (with the 1-based
/// line number) or InvalidInstance.
ProblemInstance parse_instance(const std::string& text);
ProblemInstance read_instance_file(const std::string& path);

std::string format_instance(const ProblemInstance& instance);

/// FNV-1a 64 of the canonical text form, as 16 hex digits.
std::string instance_hash(const ProblemInstance& instance);

}  // namespace illl
