#pragma once

// Helpers shared by the unit tests. The energy here is written independently
// of the library so it can serve as an oracle.

#include <string>

#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace test {

/// Couplings and fields are multiples of 1/64 in [-1, 1], so every energy sum
/// is exact in double precision regardless of order.
inline fgs::IsingProblem random_dyadic_problem(std::size_t n, double density, fgs::Rng& rng) {
  fgs::IsingBuilder b(n);
  auto value = [&] { return (static_cast<double>(rng.below(129)) - 64.0) / 64.0; };
  for (fgs::Qubit i = 0; i < n; ++i) {
    if (rng.uniform() < 0.7) b.add_field(i, value());
    for (fgs::Qubit j = i + 1; j < n; ++j)
      if (rng.uniform() < density) b.add_coupling(i, j, value());
  }
  return b.build();
}

inline double energy_from_scratch(const fgs::IsingProblem& p, const std::string& bits) {
  auto z = [&](fgs::Qubit i) { return bits[i] == '0' ? 1.0 : -1.0; };
  double e = 0.0;
  for (const auto& c : p.couplers()) e += c.value * z(c.i) * z(c.j);
  for (fgs::Qubit i = 0; i < p.size(); ++i) e += p.field(i) * z(i);
  return e;
}

}  // namespace test
