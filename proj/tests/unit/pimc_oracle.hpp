#pragma once

// Exact Trotter-slice Gibbs distribution of a small problem, by enumerating
// every slice configuration. Written from the weight formula alone:
//   w(z) = exp(-(beta/P) sum_k E_B(z^k) + sum_i K_i sum_k z_i^k z_i^{k+1}).

#include <cmath>
#include <map>
#include <vector>

#include "fgs/anneal.hpp"

namespace test {

struct FrozenSystem {
  fgs::IsingProblem problem;
  double s = 0.5;
  double beta = 1.0;
  std::size_t slices = 4;
  std::map<fgs::Qubit, double> offsets;
};

inline double local_s(const FrozenSystem& sys, fgs::Qubit i) {
  auto it = sys.offsets.find(i);
  return it == sys.offsets.end() ? sys.s : std::clamp(sys.s + it->second, 0.0, 1.0);
}

/// Index of a configuration: bit (k * n + i) set when spin i of slice k is -1.
inline std::vector<double> exact_distribution(const FrozenSystem& sys) {
  const std::size_t n = sys.problem.size(), p = sys.slices, m = n * p;
  auto A = [](double s) { return 1.0 - s; };
  auto B = [](double s) { return s; };
  std::vector<double> weight(std::size_t{1} << m);
  std::vector<double> log_w(weight.size());
  double top = -1e300;
  for (std::size_t c = 0; c < weight.size(); ++c) {
    auto z = [&](std::size_t k, fgs::Qubit i) { return (c >> (k * n + i)) & 1 ? -1.0 : 1.0; };
    double lw = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      double e = 0.0;
      for (fgs::Qubit i = 0; i < n; ++i) e += sys.problem.field(i) * B(local_s(sys, i)) * z(k, i);
      for (const auto& cp : sys.problem.couplers()) {
        const bool oi = sys.offsets.contains(cp.i), oj = sys.offsets.contains(cp.j);
        double b = B(sys.s);
        if (oi && oj) b = 0.5 * (B(local_s(sys, cp.i)) + B(local_s(sys, cp.j)));
        else if (oi) b = B(local_s(sys, cp.i));
        else if (oj) b = B(local_s(sys, cp.j));
        e += cp.value * b * z(k, cp.i) * z(k, cp.j);
      }
      lw -= sys.beta / static_cast<double>(p) * e;
    }
    for (fgs::Qubit i = 0; i < n; ++i) {
      const double K = -0.5 * std::log(std::tanh(sys.beta * A(local_s(sys, i)) / static_cast<double>(p)));
      for (std::size_t k = 0; k < p; ++k) lw += K * z(k, i) * z((k + 1) % p, i);
    }
    log_w[c] = lw;
    top = std::max(top, lw);
  }
  double total = 0.0;
  for (std::size_t c = 0; c < weight.size(); ++c) total += weight[c] = std::exp(log_w[c] - top);
  for (auto& w : weight) w /= total;
  return weight;
}

/// Empirical distribution of the PIMC chain at frozen s, recorded after every
/// sweep following `burn_in` sweeps; returns the total-variation distance.
inline double pimc_total_variation(const FrozenSystem& sys, std::size_t sweeps, std::size_t burn_in,
                                   std::uint64_t seed) {
  const auto exact = exact_distribution(sys);
  std::vector<fgs::Offset> offs;
  for (const auto& [q, ds] : sys.offsets) offs.push_back({q, ds});
  const fgs::Schedule schedule;
  fgs::PimcChain chain(sys.problem, sys.slices, sys.beta, schedule, offs);
  fgs::Rng rng(seed);
  chain.randomize(rng);
  chain.set_s(sys.s);
  const std::size_t n = sys.problem.size();
  std::vector<double> counts(exact.size(), 0.0);
  for (std::size_t t = 0; t < burn_in + sweeps; ++t) {
    chain.sweep(rng);
    if (t < burn_in) continue;
    std::size_t c = 0;
    for (std::size_t k = 0; k < sys.slices; ++k)
      for (fgs::Qubit i = 0; i < n; ++i)
        if (chain.spin(k, i) == -1) c |= std::size_t{1} << (k * n + i);
    counts[c] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) tv += std::abs(counts[c] / static_cast<double>(sweeps) - exact[c]);
  return 0.5 * tv;
}

inline fgs::IsingProblem three_qubit_problem() {
  return fgs::IsingBuilder(3)
      .add_coupling(0, 1, -1.0)
      .add_coupling(1, 2, 0.5)
      .add_coupling(0, 2, -0.25)
      .add_field(0, 0.3)
      .add_field(2, -0.2)
      .build();
}

}  // namespace test
