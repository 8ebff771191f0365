#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fgs/penalty.hpp"
#include "test_support.hpp"

using namespace fgs;

TEST_CASE("nonlinear penalty shape", "[penalty]") {
  CHECK(penalty_center(8) == 7.0);
  CHECK(nonlinear_penalty(7, 8) == 0.0);
  CHECK(nonlinear_penalty(0, 8) == Catch::Approx(1.0 - std::exp(-49.0 / 9.0)));
  for (std::size_t n : {4u, 16u, 100u})
    for (std::size_t d = 0; d <= n; ++d) {
      const double e = nonlinear_penalty(d, n);
      CHECK(e >= 0.0);
      CHECK(e < 1.0);
    }
  CHECK_THROWS_AS(nonlinear_penalty(9, 8), ContractViolation);
}

TEST_CASE("support distance counts only supported qubits", "[penalty]") {
  const PenaltyParams pen{SpinState::from_bits("0000"), 1.0, {1, 3}};
  CHECK(support_distance(SpinState::from_bits("1111"), pen) == 2);
  CHECK(support_distance(SpinState::from_bits("1010"), pen) == 0);
  CHECK(pen.n() == 2);
  const PenaltyParams all{SpinState::from_bits("0000"), 1.0, {}};
  CHECK(support_distance(SpinState::from_bits("1110"), all) == 3);
}

TEST_CASE("composite delta matches two evaluations", "[penalty]") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto p = test::random_dyadic_problem(10, 0.4, rng);
    std::vector<Qubit> support;
    for (Qubit q = 0; q < 10; ++q)
      if (rng.coin()) support.push_back(q);
    const auto pen = random_penalty(10, 3.0, rng, support);
    const CompositeObjective obj(p, pen, 1.5);
    const auto s = SpinState::random(10, rng);
    for (Qubit i = 0; i < 10; ++i) {
      auto u = s;
      u.flip(i);
      CHECK(obj.delta(s, i) == Catch::Approx(obj.value(u) - obj.value(s)).margin(1e-12));
    }
  }
}

TEST_CASE("fast composite greedy follows the generic walk", "[penalty]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng setup(seed);
    const std::size_t n = 6 + setup.below(20);
    const auto p = test::random_dyadic_problem(n, 0.3, setup);
    std::vector<Qubit> support;
    if (seed % 2)
      for (Qubit q = 0; q < n; ++q)
        if (setup.coin()) support.push_back(q);
    const auto pen = random_penalty(n, static_cast<double>(setup.below(12)), setup, support);
    const auto start = SpinState::random(n, setup);

    Rng r1(seed + 1000), r2(seed + 1000);
    const auto generic = greedy_descent(CompositeObjective(p, pen), start, &r1);
    const auto fast = composite_greedy(p, start, pen, r2);
    CHECK(fast.state == generic);
    CHECK(fast.value == Catch::Approx(composite_energy(p, generic, pen)).margin(1e-12));
    CHECK(r1.below(1u << 30) == r2.below(1u << 30));
    CHECK(is_local_minimum(CompositeObjective(p, pen), fast.state));
  }
}

TEST_CASE("Dickson spectrum by full enumeration", "[penalty]") {
  const auto dk = build_dickson(0.125);
  std::vector<double> e(1u << 16);
  for (std::uint32_t bits = 0; bits < e.size(); ++bits) {
    std::string b(16, '0');
    for (int i = 0; i < 16; ++i) b[i] = (bits >> i) & 1 ? '1' : '0';
    e[bits] = test::energy_from_scratch(dk.problem, b);
  }
  std::size_t ground = 0, first = 0;
  double lo = 1e300;
  for (double x : e) lo = std::min(lo, x);
  CHECK(lo == -17.0);
  double next = 1e300;
  for (double x : e)
    if (x > lo + 1e-9) next = std::min(next, x);
  CHECK(next == -15.0);
  for (std::uint32_t bits = 0; bits < e.size(); ++bits) {
    if (e[bits] == -17.0) {
      ++ground;
      CHECK(bits == 0xFFFF);
    }
    if (e[bits] != -15.0) continue;
    ++first;
    std::size_t zero_cost = 0;
    for (int i = 8; i < 16; ++i) zero_cost += e[bits ^ (1u << i)] == -15.0;
    CHECK(zero_cost == 8);
  }
  CHECK(ground == 1);
  CHECK(first == 256);
  CHECK(energy(dk.problem, dk.ground) == -17.0);
  for (std::uint32_t o : {0u, 17u, 255u}) CHECK(energy(dk.problem, dk.false_state(o)) == -15.0);
}

TEST_CASE("tradeoff at zero penalty", "[penalty]") {
  const auto t = flexibility_tradeoff_16(std::vector<double>{0.0, 8.0}, 50, 1);
  REQUIRE(t.points.size() == 2);
  CHECK(t.true_ground_energy == -17.0);
  CHECK(t.points[0].ground_mean == -17.0);
  CHECK(t.points[0].flexible_mean == -15.0);
  CHECK(t.points[0].confidence_flexible_better == 0.0);
  const auto again = flexibility_tradeoff_16(std::vector<double>{0.0, 8.0}, 50, 1);
  CHECK(again.points[1].flexible_mean == t.points[1].flexible_mean);
  std::ostringstream os;
  write_tradeoff_csv(os, t, {"seed 1"});
  CHECK(os.str().rfind("# seed 1\nlambda,series,mean,stderr\n0,ground_start,-17,0\n", 0) == 0);
}

TEST_CASE("linear grids", "[penalty]") {
  const auto g = default_lambda_grid();
  REQUIRE(g.size() == 41);
  CHECK(g[1] == 0.5);
  CHECK(g.back() == 20.0);
  CHECK(linear_grid(2.0, 5.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("use-case pipeline at zero penalty prefers the ground state", "[penalty]") {
  InstanceConfig c;
  c.rows = c.cols = 3;
  c.feature_count = 2;
  c.n_loops = 60;
  const auto inst = build_instance(c, 9);
  auto samples = trivial_baseline(inst);
  auto planted = classify(inst.planted_state, inst);
  samples.push_back(planted);
  Rng rng(1);
  const auto starts = k_starts(samples, 2, rng);
  REQUIRE(starts.size() == 3);
  const std::vector<double> lambdas{0.0, 10.0};
  const auto r = usecase_pipeline(inst, starts, lambdas, 20, 5);
  CHECK(r.optimal_k[0] == 0);
  CHECK(r.curves[0].mean[0] == 0.0);
  CHECK(r.curves[1].mean[0] <= 4.0);
  const auto again = usecase_pipeline(inst, starts, lambdas, 20, 5);
  for (std::size_t c2 = 0; c2 < r.curves.size(); ++c2) CHECK(r.curves[c2].mean == again.curves[c2].mean);
  std::ostringstream a, b;
  write_usecase_csv(a, {{"x", r}}, {});
  write_usecase_csv(b, {{"x", again}}, {});
  CHECK(a.str() == b.str());
}
