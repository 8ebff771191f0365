#include <catch_amalgamated.hpp>

#include <set>

#include "fgs/chimera.hpp"

using namespace fgs;

namespace {

// Adjacency rule written from coordinates alone.
bool coupled(const ChimeraCoord& a, const ChimeraCoord& b) {
  if (a.row == b.row && a.col == b.col) return a.side != b.side;
  if (a.side != b.side || a.shore != b.shore) return false;
  if (a.side == Side::vertical) return a.col == b.col && (a.row + 1 == b.row || b.row + 1 == a.row);
  return a.row == b.row && (a.col + 1 == b.col || b.col + 1 == a.col);
}

}  // namespace

TEST_CASE("chimera edge counts", "[chimera]") {
  for (auto [m, n, l] : {std::tuple{1, 1, 4}, {2, 2, 4}, {4, 4, 4}, {16, 16, 4}, {3, 5, 2}}) {
    const ChimeraGraph g(m, n, l);
    CHECK(g.size() == static_cast<std::size_t>(2 * m * n * l));
    CHECK(g.edges().size() == static_cast<std::size_t>(m * n * l * l + (m - 1) * n * l + m * (n - 1) * l));
  }
  CHECK(ChimeraGraph(1, 1, 4).edges().size() == 16);
  CHECK_THROWS_AS(ChimeraGraph(0, 2, 4), ContractViolation);
}

TEST_CASE("index and coordinate are inverse", "[chimera]") {
  const ChimeraGraph g(3, 4, 4);
  for (Qubit q = 0; q < g.size(); ++q) CHECK(g.index(g.coord(q)) == q);
  CHECK(g.index({0, 0, Side::vertical, 0}) == 0);
  CHECK(g.index({0, 0, Side::horizontal, 0}) == 4);
  CHECK(g.index({0, 1, Side::vertical, 0}) == 8);
  CHECK_THROWS_AS(g.coord(static_cast<Qubit>(g.size())), ContractViolation);
}

TEST_CASE("adjacency follows the unit-cell and inter-cell rule", "[chimera]") {
  const ChimeraGraph g(3, 3, 4);
  std::size_t count = 0;
  for (Qubit u = 0; u < g.size(); ++u)
    for (Qubit v = 0; v < g.size(); ++v) {
      if (u == v) continue;
      CHECK(g.adjacent(u, v) == coupled(g.coord(u), g.coord(v)));
      count += g.adjacent(u, v);
    }
  CHECK(count == 2 * g.edges().size());
  std::set<Edge> unique(g.edges().begin(), g.edges().end());
  CHECK(unique.size() == g.edges().size());
}

TEST_CASE("self-avoiding walks respect the mask and never revisit", "[chimera]") {
  const ChimeraGraph g(4, 4, 4);
  QubitMask mask(g.size());
  for (Qubit q : g.cell_qubits(1, 1)) mask.reserve(q);
  Rng rng(5);
  std::size_t produced = 0;
  for (int t = 0; t < 200; ++t) {
    const Qubit start = static_cast<Qubit>(rng.below(g.size()));
    if (mask.contains(start)) continue;
    const auto walk = self_avoiding_walk(g, start, 14, mask, rng);
    if (!walk) continue;
    ++produced;
    REQUIRE(walk->size() == 15);
    CHECK(std::set<Qubit>(walk->begin(), walk->end()).size() == 15);
    for (std::size_t i = 0; i + 1 < walk->size(); ++i) CHECK(g.adjacent((*walk)[i], (*walk)[i + 1]));
    for (Qubit q : *walk) CHECK_FALSE(mask.contains(q));
  }
  CHECK(produced > 100);
}

TEST_CASE("random loops are short simple cycles", "[chimera]") {
  const ChimeraGraph g(4, 4, 4);
  QubitMask mask(g.size());
  mask.reserve(0);
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    const auto c = random_loop(g, mask, 5, rng);
    REQUIRE(c.size() >= 4);  // chimera is bipartite: no odd cycles
    CHECK(c.size() <= 5);
    CHECK(c.size() % 2 == 0);
    CHECK(std::set<Qubit>(c.begin(), c.end()).size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(g.adjacent(c[i], c[(i + 1) % c.size()]));
    for (Qubit q : c) CHECK(q != 0);
  }
}

TEST_CASE("loop budget exhaustion is reported", "[chimera]") {
  // Only a path survives the mask: no cycle exists.
  const ChimeraGraph g(1, 2, 4);
  QubitMask mask(g.size());
  for (Qubit q = 0; q < g.size(); ++q) mask.reserve(q);
  for (Qubit q : {g.index({0, 0, Side::vertical, 0}), g.index({0, 0, Side::horizontal, 0}),
                  g.index({0, 1, Side::horizontal, 0})})
    mask.release(q);
  Rng rng(1);
  CHECK_THROWS_AS(random_loop(g, mask, 5, rng, 50), BudgetExhausted);
}
