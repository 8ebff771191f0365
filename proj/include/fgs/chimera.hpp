#pragma once

// Chimera hardware graph: an M x N grid of K_{L,L} unit cells. Linear index
// ((row * N + col) * 2 + side) * L + shore, where side 0 is the vertical shore
// (couples to the same shore index in the cells above/below) and side 1 the
// horizontal shore (couples left/right).

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fgs/errors.hpp"
#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace fgs {

enum class Side : std::uint8_t { vertical = 0, horizontal = 1 };

struct ChimeraCoord {
  std::size_t row;
  std::size_t col;
  Side side;
  std::size_t shore;
  friend bool operator==(const ChimeraCoord&, const ChimeraCoord&) = default;
};

struct Edge {
  Qubit a;  // a < b
  Qubit b;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Qubit u, Qubit v) { return u < v ? Edge{u, v} : Edge{v, u}; }

class ChimeraGraph {
 public:
  ChimeraGraph(std::size_t rows, std::size_t cols, std::size_t shore = 4)
      : rows_(rows), cols_(cols), shore_(shore), adjacency_(rows * cols * 2 * shore) {
    require(rows >= 1 && cols >= 1 && shore >= 1, "chimera dimensions must be positive");
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t a = 0; a < shore; ++a)
          for (std::size_t b = 0; b < shore; ++b)
            connect(index({r, c, Side::vertical, a}), index({r, c, Side::horizontal, b}));
        for (std::size_t k = 0; k < shore; ++k) {
          if (r + 1 < rows) connect(index({r, c, Side::vertical, k}), index({r + 1, c, Side::vertical, k}));
          if (c + 1 < cols) connect(index({r, c, Side::horizontal, k}), index({r, c + 1, Side::horizontal, k}));
        }
      }
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
    std::sort(edges_.begin(), edges_.end());
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t shore() const noexcept { return shore_; }
  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t cell_count() const noexcept { return rows_ * cols_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Qubit> neighbors(Qubit q) const { return adjacency_.at(q); }

  Qubit index(const ChimeraCoord& c) const {
    require(c.row < rows_ && c.col < cols_ && c.shore < shore_, "chimera coordinate out of range");
    return static_cast<Qubit>(((c.row * cols_ + c.col) * 2 + static_cast<std::size_t>(c.side)) * shore_ + c.shore);
  }

  ChimeraCoord coord(Qubit q) const {
    require(q < size(), "qubit index out of range");
    std::size_t rest = q;
    const std::size_t k = rest % shore_;
    rest /= shore_;
    const auto side = static_cast<Side>(rest % 2);
    rest /= 2;
    return {rest / cols_, rest % cols_, side, k};
  }

  bool adjacent(Qubit u, Qubit v) const {
    const auto adj = neighbors(u);
    return std::binary_search(adj.begin(), adj.end(), v);
  }

  std::vector<Qubit> cell_qubits(std::size_t row, std::size_t col) const {
    std::vector<Qubit> out;
    for (Side side : {Side::vertical, Side::horizontal})
      for (std::size_t k = 0; k < shore_; ++k) out.push_back(index({row, col, side, k}));
    return out;
  }

 private:
  void connect(Qubit u, Qubit v) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    edges_.push_back(make_edge(u, v));
  }

  std::size_t rows_, cols_, shore_;
  std::vector<std::vector<Qubit>> adjacency_;
  std::vector<Edge> edges_;
};

inline ChimeraGraph build_chimera(std::size_t rows, std::size_t cols, std::size_t shore = 4) {
  return ChimeraGraph(rows, cols, shore);
}

/// Qubits reserved for engineered features; walks and loops avoid them.
class QubitMask {
 public:
  explicit QubitMask(std::size_t n) : reserved_(n, false) {}
  void reserve(Qubit q) { reserved_.at(q) = true; }
  void release(Qubit q) { reserved_.at(q) = false; }
  bool contains(Qubit q) const { return reserved_.at(q); }
  std::size_t size() const noexcept { return reserved_.size(); }
  std::size_t count() const { return static_cast<std::size_t>(std::count(reserved_.begin(), reserved_.end(), true)); }

 private:
  std::vector<bool> reserved_;
};

/// Self-avoiding walk of `length` edges starting at `start`. Each step is
/// uniform over unmasked, unvisited neighbors. Returns nullopt on a dead end;
/// the caller resamples.
inline std::optional<std::vector<Qubit>> self_avoiding_walk(const ChimeraGraph& g, Qubit start, std::size_t length,
                                                           const QubitMask& mask, Rng& rng) {
  require(start < g.size(), "walk start out of range");
  require(!mask.contains(start), "walk start is masked");
  require(length >= 1, "walk length must be at least 1");
  std::vector<Qubit> path{start};
  std::vector<Qubit> options;
  while (path.size() <= length) {
    options.clear();
    for (Qubit nb : g.neighbors(path.back()))
      if (!mask.contains(nb) && std::find(path.begin(), path.end(), nb) == path.end()) options.push_back(nb);
    if (options.empty()) return std::nullopt;
    path.push_back(options[rng.below(options.size())]);
  }
  return path;
}

inline constexpr std::size_t kDefaultLoopBudget = 10'000;

/// Random simple cycle on unmasked qubits. A non-backtracking random walk runs
/// until it steps onto a vertex already on its path; the closed portion is the
/// cycle. Cycles with more than max_len edges are rejected and redrawn.
/// Returned vertex list is in cycle order; the closing edge joins back() to
/// front().
inline std::vector<Qubit> random_loop(const ChimeraGraph& g, const QubitMask& mask, std::size_t max_len, Rng& rng,
                                      std::size_t budget = kDefaultLoopBudget) {
  require(max_len >= 3, "maximum loop length must be at least 3");
  std::vector<Qubit> free;
  for (Qubit q = 0; q < g.size(); ++q)
    if (!mask.contains(q)) free.push_back(q);
  require(!free.empty(), "every qubit is masked");

  std::vector<Qubit> path;
  std::unordered_map<Qubit, std::size_t> position;
  std::vector<Qubit> options;
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    path.assign({free[rng.below(free.size())]});
    position.clear();
    position[path.front()] = 0;
    while (true) {
      const Qubit here = path.back();
      const Qubit prev = path.size() >= 2 ? path[path.size() - 2] : here;
      options.clear();
      for (Qubit nb : g.neighbors(here))
        if (nb != prev && !mask.contains(nb)) options.push_back(nb);
      if (options.empty()) break;  // dead end
      const Qubit next = options[rng.below(options.size())];
      if (auto hit = position.find(next); hit != position.end()) {
        const std::size_t edges = path.size() - hit->second;
        if (edges > max_len) break;
        return {path.begin() + static_cast<std::ptrdiff_t>(hit->second), path.end()};
      }
      position[next] = path.size();
      path.push_back(next);
    }
  }
  throw BudgetExhausted("random_loop: no loop with at most " + std::to_string(max_len) + " edges after " +
                        std::to_string(budget) + " attempts (loop budget)");
}

}  // namespace fgs
