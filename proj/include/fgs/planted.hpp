#pragma once

// Frustrated-loop planted-solution instances with embedded gadgets or
// domain-wall chains.
//
// Everything is first built in the canonical frame where the planted state is
// all +1: every loop gets J = -1 on all edges but one uniformly chosen edge
// with J = +1, and features are ferromagnetic towards their externals. A
// single uniformly random gauge is then applied to the whole problem, so the
// planted state is a random configuration and every boundary coupler is
// satisfied by it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fgs/chimera.hpp"
#include "fgs/domain_wall.hpp"
#include "fgs/errors.hpp"
#include "fgs/gadget.hpp"
#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace fgs {

enum class FeatureKind { none, free_gadget, locked_gadget, chain };

inline std::string to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::none: return "none";
    case FeatureKind::free_gadget: return "gadget-free";
    case FeatureKind::locked_gadget: return "gadget-locked";
    case FeatureKind::chain: return "chain";
  }
  return "none";
}

inline FeatureKind parse_feature_kind(const std::string& s) {
  if (s == "none") return FeatureKind::none;
  if (s == "gadget-free" || s == "free") return FeatureKind::free_gadget;
  if (s == "gadget-locked" || s == "locked") return FeatureKind::locked_gadget;
  if (s == "chain") return FeatureKind::chain;
  throw ContractViolation("unknown feature kind '" + s + "' (expected none, gadget-free, gadget-locked, chain)");
}

inline bool is_gadget(FeatureKind k) { return k == FeatureKind::free_gadget || k == FeatureKind::locked_gadget; }

struct PlantedLoop {
  std::vector<Qubit> cycle;  // closing edge joins back() to front()
  std::vector<Term> terms;   // physical frame
  std::size_t edges() const noexcept { return cycle.size(); }
};

struct LoopPlanting {
  IsingProblem problem;
  SpinState planted;  // also the gauge that was applied
  std::vector<PlantedLoop> loops;
};

namespace detail {

inline std::vector<PlantedLoop> canonical_loops(const ChimeraGraph& g, const QubitMask& mask, std::size_t n_loops,
                                                std::size_t max_len, Rng& rng, std::size_t budget) {
  std::vector<PlantedLoop> loops;
  loops.reserve(n_loops);
  for (std::size_t k = 0; k < n_loops; ++k) {
    PlantedLoop loop;
    loop.cycle = random_loop(g, mask, max_len, rng, budget);
    const std::size_t len = loop.cycle.size();
    const std::size_t frustrated = static_cast<std::size_t>(rng.below(len));
    for (std::size_t e = 0; e < len; ++e)
      loop.terms.push_back({loop.cycle[e], loop.cycle[(e + 1) % len], e == frustrated ? 1.0 : -1.0});
    loops.push_back(std::move(loop));
  }
  return loops;
}

inline void gauge_terms(std::vector<Term>& terms, const SpinState& g) {
  for (auto& t : terms) t.value *= g[t.i] * g[t.j];
}

}  // namespace detail

/// Plants n_loops frustrated loops on the unmasked part of the graph and
/// applies a uniformly random gauge. The returned state is a ground state with
/// energy sum over loops of -(len - 2).
inline LoopPlanting plant_loops(const ChimeraGraph& g, const QubitMask& mask, std::size_t n_loops, std::size_t max_len,
                                Rng& rng, std::size_t budget = kDefaultLoopBudget) {
  require(n_loops >= 1, "plant_loops: need at least one loop");
  LoopPlanting out;
  out.loops = detail::canonical_loops(g, mask, n_loops, max_len, rng, budget);
  out.planted = SpinState::random(g.size(), rng);
  IsingBuilder b(g.size());
  for (auto& loop : out.loops) {
    detail::gauge_terms(loop.terms, out.planted);
    for (const auto& t : loop.terms) b.add_coupling(t.i, t.j, t.value);
  }
  out.problem = b.build();
  return out;
}

struct InstanceConfig {
  std::size_t rows = 4;
  std::size_t cols = 4;
  std::size_t shore = 4;
  FeatureKind kind = FeatureKind::free_gadget;
  std::size_t feature_count = 4;
  double softness = 0.0;
  std::size_t n_loops = 300;
  std::size_t max_loop_len = 5;
  std::size_t placement_budget = 10'000;
  std::size_t loop_budget = kDefaultLoopBudget;
};

struct PlantedInstance {
  InstanceConfig config;
  std::uint64_t seed = 0;
  ChimeraGraph graph{1, 1, 1};
  IsingProblem problem;
  SpinState planted_state;
  double planted_energy = 0.0;
  std::vector<PlantedLoop> loops;
  std::vector<GadgetSpec> gadgets;
  std::vector<ChainSpec> chains;

  FeatureKind kind() const noexcept { return config.kind; }
  std::size_t loop_count() const noexcept { return loops.size(); }
  std::size_t feature_count() const noexcept { return gadgets.size() + chains.size(); }

  /// Qubits that receive anneal offsets: gadget paths and chain qubits.
  std::vector<Qubit> feature_qubits() const {
    std::vector<Qubit> out;
    for (const auto& gd : gadgets) out.insert(out.end(), gd.path.begin(), gd.path.end());
    for (const auto& ch : chains) out.insert(out.end(), ch.qubits.begin(), ch.qubits.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Qubits with at least one nonzero term.
  std::vector<Qubit> active_qubits() const {
    std::vector<Qubit> out;
    for (Qubit q = 0; q < problem.size(); ++q)
      if (!problem.is_isolated(q)) out.push_back(q);
    return out;
  }
};

/// Ground energy of each feature in its canonical frame with planted externals.
inline double feature_ground_energy(const GadgetSpec& spec) {
  double e = 0.0;
  for (double w : spec.strengths) e -= w;
  return e;
}

inline double feature_ground_energy(const ChainSpec& spec) { return chain_energy(spec, encode_value(0)); }

/// Bookkeeping value sum_loops -(len - 2) + sum_features ground.
inline double planted_energy_bound(const PlantedInstance& inst) {
  double e = 0.0;
  for (const auto& loop : inst.loops) e -= static_cast<double>(loop.edges()) - 2.0;
  for (const auto& gd : inst.gadgets) e += feature_ground_energy(gd);
  for (const auto& ch : inst.chains) e += feature_ground_energy(ch);
  return e;
}

namespace detail {

struct Placement {
  QubitMask mask;
  std::set<Qubit> externals;
};

inline void place_gadgets(const ChimeraGraph& g, const InstanceConfig& cfg, Rng& rng, Placement& pl,
                          std::vector<GadgetSpec>& out) {
  const auto variant = cfg.kind == FeatureKind::locked_gadget ? GadgetVariant::locked : GadgetVariant::free;
  std::size_t attempts = 0;
  std::set<std::size_t> used_cells;
  while (out.size() < cfg.feature_count) {
    if (++attempts > cfg.placement_budget)
      throw BudgetExhausted("gadget placement: placed " + std::to_string(out.size()) + " of " +
                            std::to_string(cfg.feature_count) + " gadgets within " +
                            std::to_string(cfg.placement_budget) +
                            " attempts; use a larger grid or fewer features (placement budget)");
    const std::size_t cell = static_cast<std::size_t>(rng.below(g.cell_count()));
    if (used_cells.contains(cell)) continue;
    auto spec = build_gadget(g, cell / g.cols(), cell % g.cols(), variant, rng);
    if (!spec) continue;
    const auto cell_qubits = g.cell_qubits(spec->row, spec->col);
    const bool cell_clear = std::none_of(cell_qubits.begin(), cell_qubits.end(), [&](Qubit q) {
      return pl.mask.contains(q) || pl.externals.contains(q);
    });
    if (!cell_clear || pl.mask.contains(spec->left_external) || pl.mask.contains(spec->right_external)) continue;
    used_cells.insert(cell);
    for (Qubit q : cell_qubits) pl.mask.reserve(q);
    pl.externals.insert(spec->left_external);
    pl.externals.insert(spec->right_external);
    out.push_back(std::move(*spec));
  }
}

inline void place_chains(const ChimeraGraph& g, const InstanceConfig& cfg, Rng& rng, Placement& pl,
                         std::vector<ChainSpec>& out) {
  std::size_t attempts = 0;
  while (out.size() < cfg.feature_count) {
    if (++attempts > cfg.placement_budget)
      throw BudgetExhausted("chain placement: placed " + std::to_string(out.size()) + " of " +
                            std::to_string(cfg.feature_count) + " chains within " +
                            std::to_string(cfg.placement_budget) +
                            " attempts; use a larger grid or fewer features (placement budget)");
    QubitMask blocked = pl.mask;
    for (Qubit q : pl.externals) blocked.reserve(q);
    const Qubit start = static_cast<Qubit>(rng.below(g.size()));
    if (blocked.contains(start)) continue;
    // 15 walk steps; the first 15 visited qubits form the chain.
    auto walk = self_avoiding_walk(g, start, kChainQubits, blocked, rng);
    if (!walk) continue;
    walk->resize(kChainQubits);
    auto spec = build_chain(g, *walk, cfg.softness, pl.mask, rng);
    if (!spec) continue;
    for (Qubit q : spec->qubits) pl.mask.reserve(q);
    pl.externals.insert(spec->left_external);
    pl.externals.insert(spec->right_external);
    out.push_back(std::move(*spec));
  }
}

}  // namespace detail

/// Reserves feature regions, plants loops on the rest, inserts the features
/// and applies one random gauge to everything. Bit-reproducible for a seed.
inline PlantedInstance build_instance(const InstanceConfig& cfg, std::uint64_t seed) {
  PlantedInstance inst;
  inst.config = cfg;
  if (cfg.kind == FeatureKind::none) inst.config.feature_count = 0;
  inst.seed = seed;
  inst.graph = build_chimera(cfg.rows, cfg.cols, cfg.shore);
  const ChimeraGraph& g = inst.graph;
  Rng rng(seed);

  detail::Placement pl{QubitMask(g.size()), {}};
  if (is_gadget(cfg.kind)) {
    detail::place_gadgets(g, inst.config, rng, pl, inst.gadgets);
  } else if (cfg.kind == FeatureKind::chain) {
    detail::place_chains(g, inst.config, rng, pl, inst.chains);
  }

  if (cfg.n_loops > 0) inst.loops = detail::canonical_loops(g, pl.mask, cfg.n_loops, cfg.max_loop_len, rng, cfg.loop_budget);

  const SpinState gauge = SpinState::random(g.size(), rng);
  IsingBuilder b(g.size());
  for (auto& loop : inst.loops) {
    detail::gauge_terms(loop.terms, gauge);
    for (const auto& t : loop.terms) b.add_coupling(t.i, t.j, t.value);
  }
  for (auto& gd : inst.gadgets) {
    const auto q = gd.chain();
    for (std::size_t t = 0; t < q.size(); ++t) gd.gauge[t] = gauge[q[t]];
    for (const auto& t : gd.terms()) b.add_coupling(t.i, t.j, t.value);
  }
  for (auto& ch : inst.chains) {
    for (std::size_t i = 0; i < kChainQubits; ++i) ch.gauge[i] = gauge[ch.qubits[i]];
    ch.gauge[kChainQubits] = gauge[ch.left_external];
    ch.gauge[kChainQubits + 1] = gauge[ch.right_external];
    for (const auto& t : ch.coupler_terms()) b.add_coupling(t.i, t.j, t.value);
    for (const auto& [q, h] : ch.field_terms()) b.add_field(q, h);
  }
  inst.problem = b.build();
  inst.planted_state = gauge;
  inst.planted_energy = energy(inst.problem, inst.planted_state);

  const double bound = planted_energy_bound(inst);
  if (std::abs(inst.planted_energy - bound) > 1e-9)
    throw InvariantBreach("build_instance: planted energy " + std::to_string(inst.planted_energy) +
                          " differs from the loop/feature bookkeeping " + std::to_string(bound));
  return inst;
}

/// One additive piece of the Hamiltonian and the qubits it touches.
struct Component {
  std::string label;
  std::vector<Term> couplers;
  std::vector<std::pair<Qubit, double>> fields;
};

inline std::vector<Component> components(const PlantedInstance& inst) {
  std::vector<Component> out;
  for (std::size_t k = 0; k < inst.loops.size(); ++k)
    out.push_back({"loop " + std::to_string(k), inst.loops[k].terms, {}});
  for (std::size_t k = 0; k < inst.gadgets.size(); ++k)
    out.push_back({"gadget " + std::to_string(k), inst.gadgets[k].terms(), {}});
  for (std::size_t k = 0; k < inst.chains.size(); ++k)
    out.push_back({"chain " + std::to_string(k), inst.chains[k].coupler_terms(), inst.chains[k].field_terms()});
  return out;
}

struct ComponentCheck {
  double planted;
  double minimum;
};

/// Exact minimum of one component over all of its qubits.
inline ComponentCheck check_component(const Component& c, const SpinState& planted) {
  std::map<Qubit, Qubit> local;
  auto idx = [&](Qubit q) {
    auto [it, inserted] = local.try_emplace(q, static_cast<Qubit>(local.size()));
    return it->second;
  };
  for (const auto& t : c.couplers) idx(t.i), idx(t.j);
  for (const auto& f : c.fields) idx(f.first);
  IsingBuilder b(local.size());
  SpinState at(local.size());
  for (const auto& t : c.couplers) b.add_coupling(idx(t.i), idx(t.j), t.value);
  for (const auto& [q, h] : c.fields) b.add_field(idx(q), h);
  for (const auto& [q, l] : local) at[l] = planted[q];
  const auto p = b.build();
  return {energy(p, at), brute_force_ground(p).energy};
}

struct Certificate {
  bool ok = true;
  std::string reason;
};

/// Sufficient certificate that the planted state is a global ground state:
/// the components add up to the problem, the planted state attains each
/// component's minimum, and it satisfies every boundary coupler.
inline Certificate certify_planted_report(const PlantedInstance& inst, double tol = 1e-9) {
  const auto comps = components(inst);
  const std::size_t n = inst.problem.size();
  if (inst.planted_state.size() != n) return {false, "planted state has the wrong length"};

  IsingBuilder sum(n);
  for (const auto& c : comps) {
    for (const auto& t : c.couplers) sum.add_coupling(t.i, t.j, t.value);
    for (const auto& [q, h] : c.fields) sum.add_field(q, h);
  }
  const auto rebuilt = sum.build();
  std::map<std::pair<Qubit, Qubit>, double> diff;
  for (const auto& c : rebuilt.couplers()) diff[{c.i, c.j}] += c.value;
  for (const auto& c : inst.problem.couplers()) diff[{c.i, c.j}] -= c.value;
  for (const auto& [ij, d] : diff)
    if (std::abs(d) > tol)
      return {false, "coupler (" + std::to_string(ij.first) + "," + std::to_string(ij.second) +
                         ") is not explained by the components"};
  for (Qubit q = 0; q < n; ++q)
    if (std::abs(rebuilt.field(q) - inst.problem.field(q)) > tol)
      return {false, "field on qubit " + std::to_string(q) + " is not explained by the components"};

  for (const auto& c : comps) {
    const auto chk = check_component(c, inst.planted_state);
    if (chk.planted > chk.minimum + tol) return {false, c.label + " is not minimized by the planted state"};
  }
  auto satisfied = [&](const Term& t) { return t.value * inst.planted_state[t.i] * inst.planted_state[t.j] < 0.0; };
  for (const auto& gd : inst.gadgets)
    for (const auto& t : gd.boundary_terms())
      if (!satisfied(t)) return {false, "gadget boundary coupler frustrated by the planted state"};
  for (const auto& ch : inst.chains)
    for (const auto& t : ch.boundary_terms())
      if (!satisfied(t)) return {false, "chain boundary coupler frustrated by the planted state"};
  if (std::abs(energy(inst.problem, inst.planted_state) - inst.planted_energy) > tol)
    return {false, "recorded planted energy does not match the problem"};
  return {};
}

inline bool certify_planted(const PlantedInstance& inst) { return certify_planted_report(inst).ok; }

/// Planted state with feature `index` moved to its cheapest hand-made active
/// configuration: a chain's wall at the soft-region midpoint (one frustrated
/// boundary coupler), or a gadget's whole path flipped (both boundary couplers
/// frustrated, every path qubit free).
inline SpinState activate_feature(const PlantedInstance& inst, const SpinState& state, std::size_t index) {
  SpinState out = state;
  if (index < inst.gadgets.size()) {
    for (Qubit q : inst.gadgets[index].path) out[q] = static_cast<Spin>(-inst.planted_state[q]);
    return out;
  }
  index -= inst.gadgets.size();
  require(index < inst.chains.size(), "activate_feature: feature index out of range");
  const auto& ch = inst.chains[index];
  const auto z = encode_value(ch.midpoint());
  for (std::size_t i = 0; i < kChainQubits; ++i) out[ch.qubits[i]] = static_cast<Spin>(z[i] * ch.gauge[i]);
  return out;
}

}  // namespace fgs
