#pragma once

// Problem text format, one record per line, '#' starts a comment:
//   n <n_qubits>
//   c <i> <j> <J>
//   f <i> <h>
// Values are written with 17 significant digits so they round-trip exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "fgs/errors.hpp"
#include "fgs/ising.hpp"

namespace fgs {

inline std::string format_real(double v) {
  char buf[40];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return {buf, end};
}

inline void write_problem(std::ostream& os, const IsingProblem& p) {
  os << "n " << p.size() << '\n';
  for (const auto& c : p.couplers()) os << "c " << c.i << ' ' << c.j << ' ' << format_real(c.value) << '\n';
  const auto h = p.fields();
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i] != 0.0) os << "f " << i << ' ' << format_real(h[i]) << '\n';
}

inline IsingProblem read_problem(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<IsingBuilder> builder;
  auto fail = [&](const std::string& why) {
    throw IoError("problem file line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    try {
      if (tag == "n") {
        std::size_t n = 0;
        if (builder) fail("duplicate header");
        if (!(ls >> n)) fail("malformed header");
        builder.emplace(n);
      } else if (tag == "c") {
        Qubit i = 0, j = 0;
        double v = 0.0;
        if (!builder) fail("coupler before header");
        if (!(ls >> i >> j >> v)) fail("malformed coupler");
        builder->add_coupling(i, j, v);
      } else if (tag == "f") {
        Qubit i = 0;
        double v = 0.0;
        if (!builder) fail("field before header");
        if (!(ls >> i >> v)) fail("malformed field");
        builder->add_field(i, v);
      } else {
        fail("unknown record '" + tag + "'");
      }
    } catch (const ContractViolation& e) {
      fail(e.what());
    }
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
  }
  if (!builder) throw IoError("problem file has no 'n' header");
  return builder->build();
}

inline void save_problem(const std::string& path, const IsingProblem& p) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_problem(os, p);
  if (!os) throw IoError("failed writing " + path);
}

inline IsingProblem load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_problem(is);
}

}  // namespace fgs
