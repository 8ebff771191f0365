#pragma once

// Domain-wall encoding of a 16-valued variable on a 15-qubit ferromagnetic
// chain. Virtual qubits pin the ends (bit 1 before q_1, bit 0 after q_15), so
// a valid chain state is 1...10...0 and the value x is the number of leading
// ones. Potentials over x are realized with single-qubit fields.
//
// Everything here is in the chain's canonical frame (planted value x = 0, all
// spins +1); ChainSpec::gauge maps to physical spins.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fgs/chimera.hpp"
#include "fgs/errors.hpp"
#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace fgs {

inline constexpr std::size_t kChainQubits = 15;
inline constexpr std::size_t kChainValues = kChainQubits + 1;
inline constexpr std::size_t kSoftWidth = 7;
inline constexpr std::size_t kSoftStartMin = 2;
inline constexpr std::size_t kSoftStartMax = 6;
inline constexpr double kPlateauHeight = 2.0;

using ChainPotential = std::array<double, kChainValues>;
using ChainFields = std::array<double, kChainQubits>;

/// q_i = bit 1 (z = -1) for i <= x, bit 0 otherwise (1-based i).
inline std::vector<Spin> encode_value(std::size_t x) {
  require(x < kChainValues, "domain-wall value must lie in 0..15");
  std::vector<Spin> z(x, Spin{-1});
  z.resize(kChainQubits, Spin{1});
  return z;
}

struct ChainReadout {
  bool valid = false;
  std::size_t value = 0;  // meaningful only when valid
};

inline ChainReadout decode_chain(std::span<const Spin> z) {
  require(z.size() == kChainQubits, "decode_chain: fragment must have 15 spins");
  // Count 1->0 transitions in (virtual 1, q_1..q_15, virtual 0).
  std::size_t walls = 0, value = 0;
  Spin prev = -1;
  for (std::size_t i = 0; i <= kChainQubits; ++i) {
    const Spin cur = i < kChainQubits ? z[i] : Spin{1};
    if (prev == -1 && cur == 1) {
      ++walls;
      value = i;
    }
    prev = cur;
  }
  if (walls != 1) return {};
  return {true, value};
}

/// Field energy sum_i h_i z_i of a canonical chain fragment.
inline double chain_field_energy(const ChainFields& h, std::span<const Spin> z) {
  double e = 0.0;
  for (std::size_t i = 0; i < kChainQubits; ++i) e += h[i] * z[i];
  return e;
}

struct SynthesizedFields {
  ChainFields h{};
  double offset = 0.0;  // potential(x) = field energy(encode(x)) + offset
};

/// Moving the wall from x to x+1 flips q_{x+1} from +1 to -1, changing the
/// field energy by -2 h_{x+1}; each field is set from that finite difference.
inline SynthesizedFields synthesize_fields(const ChainPotential& potential) {
  SynthesizedFields out;
  for (double v : potential) require(std::isfinite(v), "synthesize_fields: potential must be finite");
  for (std::size_t i = 0; i < kChainQubits; ++i) out.h[i] = -0.5 * (potential[i + 1] - potential[i]);
  double at_zero = 0.0;
  for (double h : out.h) at_zero += h;
  out.offset = potential[0] - at_zero;
  return out;
}

/// Fields penalizing the single value v by `weight` and nothing else, built
/// from delta_i = (z_i - z_{i-1}) / 2 with virtual-qubit terms folded into
/// the constant.
inline SynthesizedFields value_penalty_fields(std::size_t v, double weight) {
  require(v < kChainValues, "value_penalty_fields: value must lie in 0..15");
  SynthesizedFields out;
  if (v < kChainQubits) out.h[v] += 0.5 * weight;  // +z_{v+1}/2
  if (v > 0) out.h[v - 1] -= 0.5 * weight;         // -z_v/2
  if (v == 0) out.offset += 0.5 * weight;          // -z_0/2, z_0 = -1
  if (v == kChainQubits) out.offset += 0.5 * weight;  // +z_16/2, z_16 = +1
  return out;
}

/// Zero at x = 0 and at the midpoint m = a + 3, rising as softness*|j|/2 for
/// x = m + j inside [a, a + 6]; every other value sits on the +2 plateau.
inline ChainPotential soft_potential(std::size_t soft_start, double softness) {
  require(soft_start >= kSoftStartMin && soft_start <= kSoftStartMax, "soft region must start in 2..6");
  require(softness >= 0.0, "softness must be non-negative");
  ChainPotential p;
  p.fill(kPlateauHeight);
  p[0] = 0.0;
  const auto mid = static_cast<long>(soft_start + kSoftWidth / 2);
  for (std::size_t x = soft_start; x < soft_start + kSoftWidth; ++x)
    p[x] = softness * std::abs(static_cast<long>(x) - mid) / 2.0;
  return p;
}

/// Fields from the frustrating virtual qubits at both ends.
inline ChainFields end_fields() {
  ChainFields h{};
  h.front() = 1.0;   // ferromagnetic bond to a virtual z = -1
  h.back() = -1.0;   // ferromagnetic bond to a virtual z = +1
  return h;
}

struct ChainSpec {
  std::vector<Qubit> qubits;  // q_1..q_15 along a hardware path
  std::size_t soft_start = kSoftStartMin;  // a
  double softness = 0.0;
  ChainPotential potential{};
  ChainFields potential_fields{};
  Qubit left_external = 0;   // coupled to q_a
  Qubit right_external = 0;  // coupled to q_{a+7}
  std::vector<Spin> gauge;   // physical planted spins of [q_1..q_15, left_external, right_external]

  std::size_t midpoint() const noexcept { return soft_start + kSoftWidth / 2; }
  std::size_t soft_end() const noexcept { return soft_start + kSoftWidth - 1; }
  bool in_soft_region(std::size_t x) const noexcept { return x >= soft_start && x <= soft_end(); }

  /// Index (0-based) of the chain qubit carrying each boundary coupler.
  std::size_t left_anchor() const noexcept { return soft_start - 1; }
  std::size_t right_anchor() const noexcept { return soft_start + kSoftWidth - 1; }

  ChainFields canonical_fields() const {
    ChainFields h = end_fields();
    for (std::size_t i = 0; i < kChainQubits; ++i) h[i] += potential_fields[i];
    return h;
  }

  std::vector<Term> coupler_terms() const {
    std::vector<Term> out;
    for (std::size_t i = 0; i + 1 < kChainQubits; ++i)
      out.push_back({qubits[i], qubits[i + 1], -1.0 * gauge[i] * gauge[i + 1]});
    const auto boundary = boundary_terms();
    out.insert(out.end(), boundary.begin(), boundary.end());
    return out;
  }

  std::array<Term, 2> boundary_terms() const {
    const Spin gl = gauge[kChainQubits], gr = gauge[kChainQubits + 1];
    return {Term{qubits[left_anchor()], left_external, -1.0 * gauge[left_anchor()] * gl},
            Term{qubits[right_anchor()], right_external, -1.0 * gauge[right_anchor()] * gr}};
  }

  std::vector<std::pair<Qubit, double>> field_terms() const {
    const auto h = canonical_fields();
    std::vector<std::pair<Qubit, double>> out;
    for (std::size_t i = 0; i < kChainQubits; ++i) out.emplace_back(qubits[i], h[i] * gauge[i]);
    return out;
  }

  /// Canonical chain fragment of a physical state.
  std::vector<Spin> fragment(const SpinState& state) const {
    std::vector<Spin> z(kChainQubits);
    for (std::size_t i = 0; i < kChainQubits; ++i) z[i] = static_cast<Spin>(state[qubits[i]] * gauge[i]);
    return z;
  }
};

/// Frustrated boundary couplers for a valid value with externals at their
/// planted values: q_a is bit 1 iff x >= a, q_{a+7} is bit 1 iff x >= a+7.
inline std::size_t boundary_frustrations(const ChainSpec& spec, std::size_t x) {
  return (x >= spec.left_anchor() + 1 ? 1u : 0u) + (x >= spec.right_anchor() + 1 ? 1u : 0u);
}

/// Canonical chain energy (couplers, end fields, potential fields, boundary
/// couplers with externals held at `ext_left`, `ext_right`).
inline double chain_energy(const ChainSpec& spec, std::span<const Spin> z, Spin ext_left = 1, Spin ext_right = 1) {
  require(z.size() == kChainQubits, "chain_energy: fragment must have 15 spins");
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < kChainQubits; ++i) e -= z[i] * z[i + 1];
  e += chain_field_energy(spec.canonical_fields(), z);
  e -= z[spec.left_anchor()] * ext_left;
  e -= z[spec.right_anchor()] * ext_right;
  return e;
}

/// Draws the soft-region start, builds the potential and fields, and picks
/// one admissible external neighbour for each anchor qubit. Returns nullopt if
/// an anchor has no unmasked neighbour outside the chain (caller resamples the
/// path).
inline std::optional<ChainSpec> build_chain(const ChimeraGraph& g, std::span<const Qubit> path, double softness,
                                            const QubitMask& mask, Rng& rng) {
  require(path.size() == kChainQubits, "build_chain: path must have 15 qubits");
  require(softness >= 0.0 && softness < kPlateauHeight, "build_chain: softness must lie in [0, 2)");
  ChainSpec spec;
  spec.qubits.assign(path.begin(), path.end());
  spec.soft_start = kSoftStartMin + static_cast<std::size_t>(rng.below(kSoftStartMax - kSoftStartMin + 1));
  spec.softness = softness;
  spec.potential = soft_potential(spec.soft_start, softness);
  spec.potential_fields = synthesize_fields(spec.potential).h;

  auto pick_external = [&](std::size_t anchor) -> std::optional<Qubit> {
    std::vector<Qubit> options;
    for (Qubit nb : g.neighbors(spec.qubits[anchor]))
      if (!mask.contains(nb) && std::find(path.begin(), path.end(), nb) == path.end()) options.push_back(nb);
    if (options.empty()) return std::nullopt;
    return options[rng.below(options.size())];
  };
  const auto left = pick_external(spec.left_anchor());
  const auto right = pick_external(spec.right_anchor());
  if (!left || !right || *left == *right) return std::nullopt;
  spec.left_external = *left;
  spec.right_external = *right;
  spec.gauge.assign(kChainQubits + 2, Spin{1});
  return spec;
}

/// Valid readout with the wall inside [a, a+6]. Invalid fragments are never
/// soft.
inline bool is_soft(std::span<const Spin> fragment, const ChainSpec& spec) {
  const auto r = decode_chain(fragment);
  return r.valid && spec.in_soft_region(r.value);
}

}  // namespace fgs
