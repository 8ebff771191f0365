#pragma once

// Sample file, line oriented:
//   fgs-samples 1
//   instance <id>
//   qubits <n>
//   s_star_grid <v...>
//   offset_grid <v...>
//   params <ramp> <hold> <slices> <beta> <seed> <reads> <autoscale>
//   provenance <free text to end of line>      (optional, repeatable)
//   r <s_star> <delta_s> <read> <seed> <energy> <raw bits> <final bits>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fgs/anneal.hpp"
#include "fgs/errors.hpp"
#include "fgs/ising_io.hpp"

namespace fgs {

inline void write_samples(std::ostream& os, const SampleSet& set, const std::vector<std::string>& provenance = {}) {
  const std::size_t n = set.samples.empty() ? 0 : set.samples.front().state.size();
  os << "fgs-samples 1\n";
  os << "instance " << (set.instance_id.empty() ? "-" : set.instance_id) << '\n';
  os << "qubits " << n << '\n';
  os << "s_star_grid";
  for (double v : set.s_star_grid) os << ' ' << format_real(v);
  os << "\noffset_grid";
  for (double v : set.offset_grid) os << ' ' << format_real(v);
  const auto& p = set.params;
  os << "\nparams " << p.ramp_sweeps << ' ' << p.hold_sweeps << ' ' << p.slices << ' ' << format_real(p.beta) << ' '
     << p.seed << ' ' << p.reads << ' ' << (p.autoscale ? 1 : 0) << '\n';
  for (const auto& line : provenance) os << "provenance " << line << '\n';
  for (const auto& s : set.samples)
    os << "r " << format_real(s.s_star) << ' ' << format_real(s.delta_s) << ' ' << s.read << ' ' << s.seed << ' '
       << format_real(s.energy) << ' ' << s.raw.to_bits() << ' ' << s.state.to_bits() << '\n';
}

inline SampleSet read_samples(std::istream& is) {
  SampleSet set;
  std::string line;
  std::size_t lineno = 0, n = 0;
  bool header = false;
  auto fail = [&](const std::string& why) {
    throw IoError("sample file line " + std::to_string(lineno) + ": " + why);
  };
  auto reals = [&](std::istringstream& ls) {
    std::vector<double> out;
    double v;
    while (ls >> v) out.push_back(v);
    if (!ls.eof()) fail("malformed number");
    return out;
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!header) {
      int version = 0;
      if (tag != "fgs-samples" || !(ls >> version) || version != 1) fail("not an fgs sample file (version 1)");
      header = true;
    } else if (tag == "instance") {
      ls >> set.instance_id;
    } else if (tag == "qubits") {
      if (!(ls >> n)) fail("malformed qubit count");
    } else if (tag == "s_star_grid") {
      set.s_star_grid = reals(ls);
    } else if (tag == "offset_grid") {
      set.offset_grid = reals(ls);
    } else if (tag == "params") {
      auto& p = set.params;
      int autoscale = 1;
      if (!(ls >> p.ramp_sweeps >> p.hold_sweeps >> p.slices >> p.beta >> p.seed >> p.reads >> autoscale))
        fail("malformed params");
      p.autoscale = autoscale != 0;
    } else if (tag == "provenance") {
      continue;
    } else if (tag == "r") {
      Sample s;
      std::string raw, fin;
      if (!(ls >> s.s_star >> s.delta_s >> s.read >> s.seed >> s.energy >> raw >> fin)) fail("malformed sample");
      if (raw.size() != n || fin.size() != n) fail("sample length does not match 'qubits'");
      try {
        s.raw = SpinState::from_bits(raw);
        s.state = SpinState::from_bits(fin);
      } catch (const ContractViolation& e) {
        fail(e.what());
      }
      set.samples.push_back(std::move(s));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!header) throw IoError("empty sample file");
  return set;
}

inline void save_samples(const std::string& path, const SampleSet& set, const std::vector<std::string>& provenance = {}) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_samples(os, set, provenance);
  if (!os) throw IoError("failed writing " + path);
}

inline SampleSet load_samples(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return read_samples(is);
}

}  // namespace fgs
