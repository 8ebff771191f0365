#pragma once

// Steepest single-flip descent. Every step evaluates all single flips and takes
// the one with the most negative change; zero-change flips are never taken, so
// the walk stops at the first state with no strictly improving flip.

#include <concepts>
#include <cstddef>
#include <vector>

#include "fgs/errors.hpp"
#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace fgs {

template <class O>
concept FlipObjective = requires(const O& o, const SpinState& s, Qubit i) {
  { o.size() } -> std::convertible_to<std::size_t>;
  { o.value(s) } -> std::convertible_to<double>;
  { o.delta(s, i) } -> std::convertible_to<double>;
};

struct IsingObjective {
  const IsingProblem& problem;
  std::size_t size() const { return problem.size(); }
  double value(const SpinState& s) const { return energy(problem, s); }
  double delta(const SpinState& s, Qubit i) const { return delta_energy(problem, s, i); }
};

/// Changes smaller than this (in magnitude) count as zero.
inline constexpr double kImprovementTolerance = 1e-12;

struct GreedyStats {
  std::size_t steps = 0;
};

/// With rng == nullptr ties go to the lowest qubit index (used for sampler
/// readout); otherwise they are broken uniformly at random.
template <FlipObjective O>
SpinState greedy_descent(const O& objective, SpinState state, Rng* rng = nullptr, GreedyStats* stats = nullptr) {
  require(state.size() == objective.size(), "greedy_descent: state length does not match the objective");
  std::vector<Qubit> best;
  while (true) {
    double best_delta = -kImprovementTolerance;
    best.clear();
    for (Qubit i = 0; i < state.size(); ++i) {
      const double d = objective.delta(state, i);
      if (d < best_delta - kImprovementTolerance) {
        best_delta = d;
        best.assign({i});
      } else if (d < -kImprovementTolerance && d <= best_delta + kImprovementTolerance) {
        best.push_back(i);
      }
    }
    if (best.empty()) break;
    const Qubit pick = rng ? best[rng->below(best.size())] : best.front();
    state.flip(pick);
    if (stats) ++stats->steps;
  }
  return state;
}

/// True when no single flip lowers the objective by more than the tolerance.
template <FlipObjective O>
bool is_local_minimum(const O& objective, const SpinState& state) {
  for (Qubit i = 0; i < state.size(); ++i)
    if (objective.delta(state, i) < -kImprovementTolerance) return false;
  return true;
}

}  // namespace fgs
