#pragma once

// Classical Ising problems E(z) = sum_{i<j} J_ij z_i z_j + sum_i h_i z_i with
// z_i in {+1, -1}. Bit convention everywhere in this library: bit 0 <-> z = +1,
// bit 1 <-> z = -1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgs/errors.hpp"
#include "fgs/rng.hpp"

namespace fgs {

using Qubit = std::uint32_t;
using Spin = std::int8_t;

struct Coupler {
  Qubit i;  // i < j
  Qubit j;
  double value;
  friend bool operator==(const Coupler&, const Coupler&) = default;
};

/// A coupler term in feature/component descriptions; no ordering required.
struct Term {
  Qubit i;
  Qubit j;
  double value;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Neighbor {
  Qubit q;
  double coupling;
};

class SpinState {
 public:
  SpinState() = default;
  explicit SpinState(std::size_t n, Spin fill = 1) : z_(n, fill) {}
  explicit SpinState(std::vector<Spin> z) : z_(std::move(z)) {
    for (Spin s : z_) require(s == 1 || s == -1, "spin values must be +1 or -1");
  }

  static SpinState from_bits(std::string_view bits) {
    std::vector<Spin> z;
    z.reserve(bits.size());
    for (char c : bits) {
      require(c == '0' || c == '1', "bitstring may only contain '0' and '1'");
      z.push_back(c == '0' ? Spin{1} : Spin{-1});
    }
    return SpinState(std::move(z));
  }

  static SpinState random(std::size_t n, Rng& rng) {
    SpinState s(n);
    for (auto& v : s.z_) v = rng.coin() ? Spin{1} : Spin{-1};
    return s;
  }

  std::string to_bits() const {
    std::string out(z_.size(), '0');
    for (std::size_t i = 0; i < z_.size(); ++i) out[i] = z_[i] == 1 ? '0' : '1';
    return out;
  }

  std::size_t size() const noexcept { return z_.size(); }
  Spin operator[](std::size_t i) const noexcept { return z_[i]; }
  Spin& operator[](std::size_t i) noexcept { return z_[i]; }
  void flip(std::size_t i) noexcept { z_[i] = static_cast<Spin>(-z_[i]); }

  std::span<const Spin> spins() const noexcept { return z_; }
  std::span<Spin> spins() noexcept { return z_; }

  friend bool operator==(const SpinState&, const SpinState&) = default;
  friend auto operator<=>(const SpinState&, const SpinState&) = default;

 private:
  std::vector<Spin> z_;
};

/// Elementwise product (sigma o g).
inline SpinState compose(const SpinState& a, const SpinState& b) {
  require(a.size() == b.size(), "compose: size mismatch");
  SpinState out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<Spin>(a[i] * b[i]);
  return out;
}

inline std::size_t hamming(const SpinState& a, const SpinState& b) {
  require(a.size() == b.size(), "hamming: size mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

class IsingProblem;

/// Accumulates terms; repeated couplers on the same pair are summed.
class IsingBuilder {
 public:
  explicit IsingBuilder(std::size_t n) : n_(n), fields_(n, 0.0) {}
  explicit IsingBuilder(const IsingProblem& p);

  IsingBuilder& add_coupling(Qubit i, Qubit j, double value) {
    check_pair(i, j);
    couplers_[key(i, j)] += value;
    return *this;
  }
  IsingBuilder& set_coupling(Qubit i, Qubit j, double value) {
    check_pair(i, j);
    couplers_[key(i, j)] = value;
    return *this;
  }
  IsingBuilder& add_field(Qubit i, double value) {
    require(i < n_, "field index out of range");
    fields_[i] += value;
    return *this;
  }
  IsingBuilder& set_field(Qubit i, double value) {
    require(i < n_, "field index out of range");
    fields_[i] = value;
    return *this;
  }

  std::size_t size() const noexcept { return n_; }
  IsingProblem build() const;

 private:
  static std::pair<Qubit, Qubit> key(Qubit i, Qubit j) { return {std::min(i, j), std::max(i, j)}; }
  void check_pair(Qubit i, Qubit j) const {
    require(i != j, "self-coupling is not allowed");
    require(i < n_ && j < n_, "coupler index out of range");
  }

  std::size_t n_;
  std::map<std::pair<Qubit, Qubit>, double> couplers_;
  std::vector<double> fields_;
};

/// Immutable sparse Ising problem. Couplers are kept in ascending (i, j)
/// order and mirrored into per-qubit incident lists.
class IsingProblem {
 public:
  IsingProblem() = default;

  std::size_t size() const noexcept { return fields_.size(); }
  std::span<const Coupler> couplers() const noexcept { return couplers_; }
  std::span<const double> fields() const noexcept { return fields_; }
  double field(Qubit i) const { return fields_.at(i); }
  std::span<const Neighbor> neighbors(Qubit i) const { return adjacency_.at(i); }

  double coupling(Qubit i, Qubit j) const {
    for (const auto& nb : adjacency_.at(i))
      if (nb.q == j) return nb.coupling;
    return 0.0;
  }

  /// True when the qubit carries no coupler and no field.
  bool is_isolated(Qubit i) const { return adjacency_.at(i).empty() && fields_.at(i) == 0.0; }

  friend bool operator==(const IsingProblem& a, const IsingProblem& b) {
    return a.couplers_ == b.couplers_ && a.fields_ == b.fields_;
  }

 private:
  friend class IsingBuilder;
  std::vector<Coupler> couplers_;
  std::vector<double> fields_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

inline IsingBuilder::IsingBuilder(const IsingProblem& p) : n_(p.size()), fields_(p.fields().begin(), p.fields().end()) {
  for (const auto& c : p.couplers()) couplers_[{c.i, c.j}] = c.value;
}

inline IsingProblem IsingBuilder::build() const {
  IsingProblem p;
  p.fields_ = fields_;
  p.adjacency_.assign(n_, {});
  p.couplers_.reserve(couplers_.size());
  for (const auto& [ij, value] : couplers_) {
    if (value == 0.0) continue;
    p.couplers_.push_back({ij.first, ij.second, value});
  }
  // std::map iteration is already ascending in (i, j); incident lists end up
  // ascending in neighbor index as well.
  for (const auto& c : p.couplers_) {
    p.adjacency_[c.i].push_back({c.j, c.value});
    p.adjacency_[c.j].push_back({c.i, c.value});
  }
  for (auto& adj : p.adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Neighbor& a, const Neighbor& b) { return a.q < b.q; });
  return p;
}

/// Summation order: couplers ascending in (i, j), then fields ascending in i.
inline double energy(const IsingProblem& p, const SpinState& s) {
  require(s.size() == p.size(), "energy: state length does not match problem size");
  double e = 0.0;
  for (const auto& c : p.couplers()) e += c.value * s[c.i] * s[c.j];
  const auto h = p.fields();
  for (std::size_t i = 0; i < h.size(); ++i) e += h[i] * s[i];
  return e;
}

inline double local_field(const IsingProblem& p, const SpinState& s, Qubit i) {
  double f = p.field(i);
  for (const auto& nb : p.neighbors(i)) f += nb.coupling * s[nb.q];
  return f;
}

/// energy(flip_i(s)) - energy(s), from the terms incident on i only.
inline double delta_energy(const IsingProblem& p, const SpinState& s, Qubit i) {
  require(s.size() == p.size(), "delta_energy: state length does not match problem size");
  require(i < p.size(), "delta_energy: qubit index out of range");
  return -2.0 * s[i] * local_field(p, s, i);
}

/// J'_ij = J_ij g_i g_j, h'_i = h_i g_i, so that E'(sigma) = E(sigma o g).
inline IsingProblem gauge_transform(const IsingProblem& p, const SpinState& g) {
  require(g.size() == p.size(), "gauge_transform: gauge length does not match problem size");
  IsingBuilder b(p.size());
  for (const auto& c : p.couplers()) b.add_coupling(c.i, c.j, c.value * g[c.i] * g[c.j]);
  const auto h = p.fields();
  for (Qubit i = 0; i < h.size(); ++i) b.add_field(i, h[i] * g[i]);
  return b.build();
}

inline constexpr std::size_t kMaxEnumerationQubits = 24;

/// Visits all 2^n states in Gray-code order as visit(state, energy). The
/// energy is maintained incrementally, so it may differ from energy() by
/// accumulated rounding on non-dyadic inputs.
template <class Visitor>
void for_each_state(const IsingProblem& p, Visitor&& visit) {
  const std::size_t n = p.size();
  require(n <= kMaxEnumerationQubits, "exhaustive enumeration is limited to 24 qubits");
  SpinState s(n, Spin{1});
  double e = energy(p, s);
  visit(static_cast<const SpinState&>(s), e);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto bit = static_cast<Qubit>(std::countr_zero(k));
    e += -2.0 * s[bit] * local_field(p, s, bit);
    s.flip(bit);
    visit(static_cast<const SpinState&>(s), e);
  }
}

struct GroundResult {
  double energy;
  std::vector<SpinState> states;  // sorted
};

/// Exact minimum and all minimizing states (degeneracy tolerance 1e-9).
inline GroundResult brute_force_ground(const IsingProblem& p, double tol = 1e-9) {
  require(p.size() <= kMaxEnumerationQubits, "brute_force_ground: more than 24 qubits");
  double best = std::numeric_limits<double>::infinity();
  std::vector<SpinState> candidates;
  for_each_state(p, [&](const SpinState& s, double e) {
    if (e < best - tol) {
      best = e;
      candidates.clear();
    }
    if (e <= best + tol) candidates.push_back(s);
  });
  double exact = std::numeric_limits<double>::infinity();
  for (const auto& s : candidates) exact = std::min(exact, energy(p, s));
  GroundResult out{exact, {}};
  for (auto& s : candidates)
    if (energy(p, s) <= exact + tol) out.states.push_back(std::move(s));
  std::sort(out.states.begin(), out.states.end());
  return out;
}

}  // namespace fgs
