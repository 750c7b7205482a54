#include "illl/instance_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace illl {

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> significant_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::istringstream ls(raw);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    out.push_back({number, std::move(tokens)});
  }
  return out;
}

Integer integer_token(const Line& line, std::size_t index) {
  try {
    return parse_integer(line.tokens[index]);
  } catch (const Error&) {
    throw ParseError(line.number, "expected an integer, got '" + line.tokens[index] + "'");
  }
}

long small_token(const Line& line, std::size_t index, long lo, long hi, const char* what) {
  Integer v = integer_token(line, index);
  if (!v.fits_slong_p() || v.get_si() < lo || v.get_si() > hi) {
    throw ParseError(line.number, std::string(what) + " out of range");
  }
  return v.get_si();
}

}  // namespace

ProblemInstance parse_instance(const std::string& text) {
  auto lines = significant_lines(text);
  if (lines.size() < 2) throw ParseError(lines.empty() ? 1 : lines.back().number + 1, "missing header lines");

  const Line& head = lines[0];
  if (head.tokens.size() != 3) throw ParseError(head.number, "expected 'm n M'");
  ProblemInstance inst;
  inst.m = static_cast<int>(small_token(head, 0, 1, 64, "m"));
  inst.n = static_cast<int>(small_token(head, 1, 1, 64, "n"));
  inst.M = static_cast<unsigned long>(small_token(head, 2, 1, 1L << 20, "M"));

  const Line& second = lines[1];
  if (second.tokens.size() != 3) throw ParseError(second.number, "expected 'q_max d_num d_den'");
  inst.q_max = integer_token(second, 0);
  Integer dn = integer_token(second, 1);
  Integer dd = integer_token(second, 2);
  if (dd <= 0) throw ParseError(second.number, "d_den must be positive");
  inst.d = make_rational(dn, dd);

  if (lines.size() != 2 + static_cast<std::size_t>(inst.n)) {
    int at = lines.size() < 2 + static_cast<std::size_t>(inst.n) ? lines.back().number + 1
                                                                   : lines[2 + inst.n].number;
    throw ParseError(at, "expected exactly n = " + std::to_string(inst.n) + " rows of A");
  }
  const Integer top = pow2(inst.M);
  inst.P = IntMatrix(inst.n, inst.m);
  for (int i = 0; i < inst.n; ++i) {
    const Line& row = lines[2 + i];
    if (row.tokens.size() != static_cast<std::size_t>(inst.m)) {
      throw ParseError(row.number, "expected m = " + std::to_string(inst.m) + " entries");
    }
    for (int j = 0; j < inst.m; ++j) {
      Integer p = integer_token(row, j);
      if (p < 1 || p > top) throw ParseError(row.number, "entry " + to_string(p) + " outside [1, 2^M]");
      inst.P(i, j) = p;
    }
  }
  validate(inst);
  return inst;
}

ProblemInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string format_instance(const ProblemInstance& instance) {
  std::ostringstream out;
  out << instance.m << ' ' << instance.n << ' ' << instance.M << '\n';
  out << to_string(instance.q_max) << ' ' << to_string(Integer(instance.d.get_num())) << ' '
      << to_string(Integer(instance.d.get_den())) << '\n';
  for (std::size_t i = 0; i < instance.P.rows(); ++i) {
    for (std::size_t j = 0; j < instance.P.cols(); ++j) {
      if (j) out << ' ';
      out << to_string(instance.P(i, j));
    }
    out << '\n';
  }
  return out.str();
}

std::string instance_hash(const ProblemInstance& instance) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : format_instance(instance)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace illl
