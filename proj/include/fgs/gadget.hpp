#pragma once

// Free-spin and locked gadgets. A gadget is a ferromagnetic path of k qubits
// (alternating shores, one unit cell) hung between two external planted
// qubits:
//
//   e_L --w0-- q_1 --w1-- q_2 -- ... -- q_k --wk-- e_R
//
// e_L is the horizontal-shore neighbour of q_1 in the next cell along the row,
// e_R the vertical-shore neighbour of q_k in the next cell along the column.
// When the externals agree the aligned path is the unique minimum. When they
// disagree one coupler must be frustrated: with unit strengths the wall can
// sit on any of the k+1 couplers (free), with the middle internal coupler at
// half strength it sits there alone (locked).
//
// Strengths are stored in the gadget's canonical frame (planted state all +1);
// `gauge` maps canonical spins to physical ones.

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "fgs/chimera.hpp"
#include "fgs/errors.hpp"
#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace fgs {

enum class GadgetVariant { free, locked };

inline constexpr std::size_t kGadgetPathLength = 4;
inline constexpr double kLockedStrength = 0.5;

struct GadgetSpec {
  std::size_t row = 0;
  std::size_t col = 0;
  GadgetVariant variant = GadgetVariant::free;
  std::vector<Qubit> path;          // q_1..q_k
  Qubit left_external = 0;          // e_L
  Qubit right_external = 0;         // e_R
  std::vector<double> strengths;    // k+1 ferromagnetic magnitudes, e_L..e_R
  std::vector<Spin> gauge;          // physical planted spins of [e_L, q_1..q_k, e_R]

  std::size_t k() const noexcept { return path.size(); }

  /// [e_L, q_1, ..., q_k, e_R]
  std::vector<Qubit> chain() const {
    std::vector<Qubit> out{left_external};
    out.insert(out.end(), path.begin(), path.end());
    out.push_back(right_external);
    return out;
  }

  /// Physical couplers -w g_u g_v, boundary couplers first/last.
  std::vector<Term> terms() const {
    const auto q = chain();
    std::vector<Term> out;
    for (std::size_t t = 0; t < strengths.size(); ++t)
      out.push_back({q[t], q[t + 1], -strengths[t] * gauge[t] * gauge[t + 1]});
    return out;
  }

  std::array<Term, 2> boundary_terms() const {
    const auto all = terms();
    return {all.front(), all.back()};
  }
};

/// Builds a gadget in cell (row, col). Shore indices are drawn at random; each
/// external lives in a neighbouring cell picked at random among those that
/// exist. Returns nullopt when the cell lacks a horizontal or vertical
/// neighbour (1-wide grids).
inline std::optional<GadgetSpec> build_gadget(const ChimeraGraph& g, std::size_t row, std::size_t col,
                                              GadgetVariant variant, Rng& rng) {
  require(row < g.rows() && col < g.cols(), "gadget cell outside the graph");
  require(g.shore() >= kGadgetPathLength / 2, "shore too small for a gadget path");
  std::vector<std::size_t> col_options, row_options;
  if (col + 1 < g.cols()) col_options.push_back(col + 1);
  if (col >= 1) col_options.push_back(col - 1);
  if (row + 1 < g.rows()) row_options.push_back(row + 1);
  if (row >= 1) row_options.push_back(row - 1);
  if (col_options.empty() || row_options.empty()) return std::nullopt;

  std::vector<std::size_t> h_shores(g.shore()), v_shores(g.shore());
  for (std::size_t i = 0; i < g.shore(); ++i) h_shores[i] = v_shores[i] = i;
  rng.shuffle(std::span<std::size_t>(h_shores));
  rng.shuffle(std::span<std::size_t>(v_shores));

  GadgetSpec spec;
  spec.row = row;
  spec.col = col;
  spec.variant = variant;
  for (std::size_t t = 0; t < kGadgetPathLength; ++t) {
    const bool horizontal = t % 2 == 0;
    const std::size_t shore = horizontal ? h_shores[t / 2] : v_shores[t / 2];
    spec.path.push_back(g.index({row, col, horizontal ? Side::horizontal : Side::vertical, shore}));
  }
  const auto first = g.coord(spec.path.front());
  const auto last = g.coord(spec.path.back());
  const std::size_t ext_col = col_options[rng.below(col_options.size())];
  const std::size_t ext_row = row_options[rng.below(row_options.size())];
  spec.left_external = g.index({row, ext_col, Side::horizontal, first.shore});
  spec.right_external = g.index({ext_row, col, Side::vertical, last.shore});

  spec.strengths.assign(kGadgetPathLength + 1, 1.0);
  if (variant == GadgetVariant::locked) spec.strengths[(kGadgetPathLength + 1) / 2] = kLockedStrength;
  spec.gauge.assign(kGadgetPathLength + 2, Spin{1});
  return spec;
}

/// Canonical-frame energy of internal spins `z` between externals zl, zr.
inline double gadget_energy(const GadgetSpec& spec, std::span<const Spin> z, Spin zl, Spin zr) {
  require(z.size() == spec.k(), "gadget_energy: internal state has wrong length");
  double e = 0.0;
  Spin prev = zl;
  for (std::size_t t = 0; t < spec.k(); ++t) {
    e -= spec.strengths[t] * prev * z[t];
    prev = z[t];
  }
  e -= spec.strengths[spec.k()] * prev * zr;
  return e;
}

struct GadgetManifold {
  double energy;
  std::vector<std::vector<Spin>> states;  // canonical internal spins q_1..q_k
};

/// Exact minimum over the 2^k internal states for fixed canonical externals.
inline GadgetManifold gadget_ground_manifold(const GadgetSpec& spec, Spin zl, Spin zr, double tol = 1e-9) {
  const std::size_t k = spec.k();
  GadgetManifold out{std::numeric_limits<double>::infinity(), {}};
  std::vector<Spin> z(k);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
    for (std::size_t t = 0; t < k; ++t) z[t] = (bits >> t) & 1 ? Spin{-1} : Spin{1};
    const double e = gadget_energy(spec, z, zl, zr);
    if (e < out.energy - tol) {
      out.energy = e;
      out.states.clear();
    }
    if (e <= out.energy + tol) out.states.push_back(z);
  }
  return out;
}

/// True iff some internal gadget qubit can be flipped at zero energy cost in
/// the full problem.
inline bool is_free(const IsingProblem& problem, const SpinState& state, const GadgetSpec& spec, double tol = 1e-9) {
  require(state.size() == problem.size(), "is_free: state does not cover the problem");
  for (Qubit q : spec.path)
    if (std::abs(delta_energy(problem, state, q)) <= tol) return true;
  return false;
}

}  // namespace fgs
