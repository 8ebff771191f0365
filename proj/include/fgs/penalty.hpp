#pragma once

// Nonlinear Hamming-distance penalty, composite greedy search, the 16-qubit
// two-minima instance and the pipelines that compare rigid and flexible
// starting states under the penalty.
//
// E(D) = 1 - exp(-(D - c)^2 / (n + 1)),  c = n/2 + sqrt(n + 1),
// where D is the Hamming distance to a random reference over the n qubits of
// the support.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fgs/analysis.hpp"
#include "fgs/errors.hpp"
#include "fgs/greedy.hpp"
#include "fgs/ising.hpp"
#include "fgs/ising_io.hpp"
#include "fgs/rng.hpp"
#include "fgs/stats.hpp"

namespace fgs {

inline double penalty_center(std::size_t n) {
  return static_cast<double>(n) / 2.0 + std::sqrt(static_cast<double>(n) + 1.0);
}

inline double nonlinear_penalty(std::size_t d, std::size_t n) {
  require(d <= n, "nonlinear_penalty: distance exceeds n");
  const double x = static_cast<double>(d) - penalty_center(n);
  return 1.0 - std::exp(-x * x / (static_cast<double>(n) + 1.0));
}

struct PenaltyParams {
  SpinState reference;
  double lambda = 0.0;
  std::vector<Qubit> support;  // qubits counted in D; empty means all

  std::size_t n() const { return support.empty() ? reference.size() : support.size(); }
};

inline std::size_t support_distance(const SpinState& s, const PenaltyParams& pen) {
  require(s.size() == pen.reference.size(), "penalty: state and reference differ in length");
  if (pen.support.empty()) return hamming(s, pen.reference);
  std::size_t d = 0;
  for (Qubit q : pen.support) d += s[q] != pen.reference[q];
  return d;
}

inline double composite_energy(const IsingProblem& p, const SpinState& s, const PenaltyParams& pen) {
  require(s.size() == p.size(), "composite_energy: state length does not match the problem");
  require(pen.lambda >= 0.0, "penalty strength must be non-negative");
  return energy(p, s) + pen.lambda * nonlinear_penalty(support_distance(s, pen), pen.n());
}

/// Composite objective for the generic greedy_descent. `offset` is subtracted
/// from the Ising part (e.g. the planted energy).
class CompositeObjective {
 public:
  CompositeObjective(const IsingProblem& p, const PenaltyParams& pen, double offset = 0.0)
      : problem_(p), pen_(pen), offset_(offset), in_support_(p.size(), pen.support.empty()) {
    require(pen.reference.size() == p.size(), "penalty reference length does not match the problem");
    for (Qubit q : pen.support) in_support_.at(q) = true;
  }
  std::size_t size() const { return problem_.size(); }
  double value(const SpinState& s) const { return composite_energy(problem_, s, pen_) - offset_; }
  double delta(const SpinState& s, Qubit i) const {
    const double d_ising = delta_energy(problem_, s, i);
    if (!in_support_[i]) return d_ising;
    const std::size_t d = support_distance(s, pen_);
    const std::size_t d_new = s[i] == pen_.reference[i] ? d + 1 : d - 1;
    return d_ising + pen_.lambda * (nonlinear_penalty(d_new, pen_.n()) - nonlinear_penalty(d, pen_.n()));
  }

 private:
  const IsingProblem& problem_;
  const PenaltyParams& pen_;
  double offset_;
  std::vector<bool> in_support_;
};

struct DescentResult {
  SpinState state;
  double value = 0.0;  // composite energy minus offset
  std::size_t steps = 0;
};

/// Same walk as greedy_descent(CompositeObjective, ...) with the same rng
/// stream, but with cached Ising deltas and the penalty change shared by all
/// qubits of each class (currently agreeing / disagreeing with the reference).
inline DescentResult composite_greedy(const IsingProblem& p, SpinState state, const PenaltyParams& pen, Rng& rng,
                                      double offset = 0.0) {
  const std::size_t n = p.size();
  require(state.size() == n && pen.reference.size() == n, "composite_greedy: size mismatch");
  std::vector<bool> in_support(n, pen.support.empty());
  for (Qubit q : pen.support) in_support.at(q) = true;
  const std::size_t m = pen.n();
  std::vector<double> d_ising(n);
  for (Qubit i = 0; i < n; ++i) d_ising[i] = delta_energy(p, state, i);
  std::size_t dist = support_distance(state, pen);
  std::vector<Qubit> best;
  DescentResult out;
  while (true) {
    const double here = nonlinear_penalty(dist, m);
    const double up = dist < m ? pen.lambda * (nonlinear_penalty(dist + 1, m) - here) : 0.0;
    const double down = dist > 0 ? pen.lambda * (nonlinear_penalty(dist - 1, m) - here) : 0.0;
    double best_delta = -kImprovementTolerance;
    best.clear();
    for (Qubit i = 0; i < n; ++i) {
      double d = d_ising[i];
      if (in_support[i]) d += state[i] == pen.reference[i] ? up : down;
      if (d < best_delta - kImprovementTolerance) {
        best_delta = d;
        best.assign({i});
      } else if (d < -kImprovementTolerance && d <= best_delta + kImprovementTolerance) {
        best.push_back(i);
      }
    }
    if (best.empty()) break;
    const Qubit q = best[rng.below(best.size())];
    if (in_support[q]) dist = state[q] == pen.reference[q] ? dist + 1 : dist - 1;
    state.flip(q);
    d_ising[q] = delta_energy(p, state, q);
    for (const auto& nb : p.neighbors(q)) d_ising[nb.q] = delta_energy(p, state, nb.q);
    ++out.steps;
  }
  out.value = energy(p, state) - offset + pen.lambda * nonlinear_penalty(dist, m);
  out.state = std::move(state);
  return out;
}

/// Uniformly random reference state.
inline PenaltyParams random_penalty(std::size_t n, double lambda, Rng& rng, std::vector<Qubit> support = {}) {
  return {SpinState::random(n, rng), lambda, std::move(support)};
}

struct DicksonInstance {
  IsingProblem problem;
  double epsilon = 0.125;
  std::vector<Qubit> inner;  // 8-ring
  std::vector<Qubit> outer;  // outer[i] hangs off inner[i]
  SpinState ground;          // all -1

  /// False-minimum state: inner ring +1, outer qubit i set from bit i.
  SpinState false_state(std::uint32_t outer_bits) const {
    SpinState s(16, Spin{1});
    for (std::size_t i = 0; i < 8; ++i) s[outer[i]] = (outer_bits >> i) & 1 ? Spin{-1} : Spin{1};
    return s;
  }
};

/// Inner 8-ring of unit ferromagnetic couplers, one unit ferromagnetic spoke
/// from each ring qubit to an outer qubit, fields +1 on the outer qubits and
/// -(1 - eps) on the ring. The ground state (all -1) satisfies the outer
/// fields and frustrates the ring fields; the ring at +1 gives 256 states,
/// 2 higher, in which every outer qubit can flip at zero cost.
inline DicksonInstance build_dickson(double epsilon = 0.125) {
  require(epsilon > 0.0 && epsilon < 1.0, "build_dickson: epsilon must lie in (0, 1)");
  DicksonInstance d;
  d.epsilon = epsilon;
  IsingBuilder b(16);
  for (Qubit i = 0; i < 8; ++i) {
    d.inner.push_back(i);
    d.outer.push_back(i + 8);
    b.add_coupling(i, (i + 1) % 8, -1.0);
    b.add_coupling(i, i + 8, -1.0);
    b.add_field(i + 8, 1.0);
    b.add_field(i, -(1.0 - epsilon));
  }
  d.problem = b.build();
  d.ground = SpinState(16, Spin{-1});
  return d;
}

struct TradeoffPoint {
  double lambda = 0.0;
  double ground_mean = 0.0, ground_stderr = 0.0;
  double flexible_mean = 0.0, flexible_stderr = 0.0;
  double diff_mean = 0.0, diff_stderr = 0.0;  // flexible - ground, paired by reference
  double confidence_flexible_better = 0.0;
};

struct TradeoffCurves {
  double true_ground_energy = 0.0;
  std::vector<TradeoffPoint> points;
};

/// For every lambda and reference r (shared across lambda), greedy on the
/// composite energy from the true ground state and from a random state of the
/// false manifold. Seeds: reference derive_seed(seed, 0, r), walks
/// derive_seed(seed, 1, lambda index, r).
inline TradeoffCurves flexibility_tradeoff_16(std::span<const double> lambdas, std::size_t n_refs, std::uint64_t seed,
                                              double epsilon = 0.125) {
  require(n_refs >= 2, "flexibility_tradeoff_16: need at least two references");
  require(!lambdas.empty(), "flexibility_tradeoff_16: empty lambda grid");
  const auto dk = build_dickson(epsilon);
  TradeoffCurves out;
  out.true_ground_energy = energy(dk.problem, dk.ground);
  std::vector<SpinState> refs;
  for (std::size_t r = 0; r < n_refs; ++r) {
    Rng rr(derive_seed(seed, 0, r));
    refs.push_back(SpinState::random(16, rr));
  }
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    require(lambdas[a] >= 0.0, "penalty strengths must be non-negative");
    std::vector<double> g(n_refs), f(n_refs), diff(n_refs);
    for (std::size_t r = 0; r < n_refs; ++r) {
      Rng rng(derive_seed(seed, 1, a, r));
      const PenaltyParams pen{refs[r], lambdas[a], {}};
      const auto flexible_start = dk.false_state(static_cast<std::uint32_t>(rng.below(256)));
      g[r] = composite_greedy(dk.problem, dk.ground, pen, rng).value;
      f[r] = composite_greedy(dk.problem, flexible_start, pen, rng).value;
      diff[r] = g[r] - f[r];
    }
    TradeoffPoint pt;
    pt.lambda = lambdas[a];
    pt.ground_mean = mean(g);
    pt.ground_stderr = standard_error(g);
    pt.flexible_mean = mean(f);
    pt.flexible_stderr = standard_error(f);
    pt.diff_mean = -mean(diff);
    pt.diff_stderr = standard_error(diff);
    pt.confidence_flexible_better = confidence_positive(diff);
    out.points.push_back(pt);
  }
  return out;
}

/// Evenly spaced grid of `count` points from lo to hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  require(count >= 1, "grid needs at least one point");
  std::vector<double> g;
  for (std::size_t i = 0; i < count; ++i)
    g.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

inline std::vector<double> default_lambda_grid() { return linear_grid(0.0, 20.0, 41); }

/// States tied for the exact-k best, from which each trial draws its start.
struct KStart {
  std::size_t k = 0;
  double energy = 0.0;  // relative to planted
  std::vector<SpinState> states;
};

inline std::vector<KStart> k_starts(std::span<const ClassifiedSample> samples, std::size_t k_max, Rng& rng,
                                    const SampleFilter& filter = {}) {
  std::vector<KStart> out;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const auto rec = conditional_best(samples, k, rng, filter);
    if (!rec) continue;
    KStart ks{k, rec->energy, {}};
    for (std::size_t i : rec->tied) ks.states.push_back(samples[i].state);
    out.push_back(std::move(ks));
  }
  return out;
}

struct UsecaseCurve {
  std::size_t k = 0;
  double start_energy = 0.0;
  std::vector<double> mean;    // per lambda, composite energy relative to planted
  std::vector<double> stderr_;
};

struct UsecaseResult {
  std::vector<double> lambdas;
  std::vector<UsecaseCurve> curves;       // ascending k, gaps where no record exists
  std::vector<std::size_t> optimal_k;     // per lambda, argmin over curves (smallest k on ties)
};

/// For each k with a record and each lambda: n_refs random references over the
/// active qubits, a start drawn uniformly among the tied k-states for every
/// trial, composite greedy, mean final composite energy relative to planted.
/// The penalty applied is lambda * lambda_scale; energies stay in problem
/// units. References are shared across k (paired comparison). Seeds:
/// reference derive_seed(seed, 0, lambda index, r), walk derive_seed(seed, 1,
/// lambda index, r, k).
inline UsecaseResult usecase_pipeline(const PlantedInstance& inst, std::span<const KStart> starts,
                                      std::span<const double> lambdas, std::size_t n_refs, std::uint64_t seed,
                                      double lambda_scale = 1.0) {
  require(!lambdas.empty(), "usecase_pipeline: empty lambda grid");
  require(n_refs >= 1, "usecase_pipeline: n_refs must be at least 1");
  require(lambda_scale > 0.0 && std::isfinite(lambda_scale), "usecase_pipeline: lambda scale must be positive");
  UsecaseResult out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  const auto support = inst.active_qubits();
  for (const auto& ks : starts) {
    require(!ks.states.empty(), "usecase_pipeline: k record without states");
    out.curves.push_back({ks.k, ks.energy, std::vector<double>(lambdas.size()), std::vector<double>(lambdas.size())});
  }
  std::vector<double> finals(n_refs);
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    std::vector<PenaltyParams> refs;
    for (std::size_t r = 0; r < n_refs; ++r) {
      Rng rr(derive_seed(seed, 0, a, r));
      refs.push_back(random_penalty(inst.problem.size(), lambdas[a] * lambda_scale, rr, support));
    }
    for (std::size_t c = 0; c < starts.size(); ++c) {
      for (std::size_t r = 0; r < n_refs; ++r) {
        Rng rng(derive_seed(seed, 1, a, r, starts[c].k));
        const auto& start = starts[c].states[rng.below(starts[c].states.size())];
        finals[r] = composite_greedy(inst.problem, start, refs[r], rng, inst.planted_energy).value;
      }
      out.curves[c].mean[a] = mean(finals);
      out.curves[c].stderr_[a] = n_refs >= 2 ? standard_error(finals) : 0.0;
    }
  }
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < out.curves.size(); ++c)
      if (out.curves[c].mean[a] < out.curves[best].mean[a]) best = c;
    out.optimal_k.push_back(out.curves.empty() ? 0 : out.curves[best].k);
  }
  return out;
}

inline void write_tradeoff_csv(std::ostream& os, const TradeoffCurves& t, const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "lambda,series,mean,stderr\n";
  for (const auto& p : t.points) {
    os << format_real(p.lambda) << ",ground_start," << format_real(p.ground_mean) << ','
       << format_real(p.ground_stderr) << '\n';
    os << format_real(p.lambda) << ",flexible_start," << format_real(p.flexible_mean) << ','
       << format_real(p.flexible_stderr) << '\n';
    os << format_real(p.lambda) << ",true_ground," << format_real(t.true_ground_energy) << ",0\n";
  }
}

inline void write_usecase_csv(std::ostream& os, const std::vector<std::pair<std::string, UsecaseResult>>& results,
                              const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "instance,k,lambda,mean_energy,stderr,diff_vs_k0\n";
  for (const auto& [id, res] : results) {
    const UsecaseCurve* k0 = nullptr;
    for (const auto& c : res.curves)
      if (c.k == 0) k0 = &c;
    for (const auto& c : res.curves)
      for (std::size_t a = 0; a < res.lambdas.size(); ++a)
        os << id << ',' << c.k << ',' << format_real(res.lambdas[a]) << ',' << format_real(c.mean[a]) << ','
           << format_real(c.stderr_[a]) << ',' << (k0 ? format_real(c.mean[a] - k0->mean[a]) : std::string()) << '\n';
  }
}

inline void write_optimal_k_csv(std::ostream& os, const std::vector<std::pair<std::string, UsecaseResult>>& results,
                                const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "instance,lambda,argmin_k\n";
  for (const auto& [id, res] : results)
    for (std::size_t a = 0; a < res.lambdas.size(); ++a)
      os << id << ',' << format_real(res.lambdas[a]) << ',' << res.optimal_k[a] << '\n';
}

/// How many instances have each optimal k, per lambda.
inline void write_optimal_k_counts_csv(std::ostream& os,
                                       const std::vector<std::pair<std::string, UsecaseResult>>& results,
                                       const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "lambda,k,instances\n";
  if (results.empty()) return;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
  for (const auto& [id, res] : results)
    for (std::size_t a = 0; a < res.lambdas.size(); ++a) ++counts[{a, res.optimal_k[a]}];
  const auto& lambdas = results.front().second.lambdas;
  for (const auto& [key, count] : counts)
    os << format_real(lambdas[key.first]) << ',' << key.second << ',' << count << '\n';
}

}  // namespace fgs
