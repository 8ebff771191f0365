#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fgs/anneal.hpp"
#include "fgs/planted.hpp"
#include "pimc_oracle.hpp"
#include "test_support.hpp"

using namespace fgs;

TEST_CASE("default schedule and table interpolation", "[anneal]") {
  const Schedule lin;
  CHECK(lin.A(0.3) == Catch::Approx(0.7));
  CHECK(lin.B(0.3) == Catch::Approx(0.3));
  CHECK(lin.A(1.5) == 0.0);
  const Schedule t({0.0, 0.5, 1.0}, {2.0, 1.0, 0.0}, {0.0, 0.2, 1.0});
  CHECK(t.A(0.25) == Catch::Approx(1.5));
  CHECK(t.B(0.75) == Catch::Approx(0.6));
  CHECK(t.B(1.0) == 1.0);
  CHECK_THROWS_AS(Schedule({0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}), ContractViolation);
  CHECK_THROWS_AS(Schedule({0.1, 1.0}, {1.0, 0.0}, {0.0, 1.0}), ContractViolation);

  const auto path = std::filesystem::temp_directory_path() / "fgs_schedule_test.txt";
  {
    std::ofstream out(path);
    out << "# s A B\n0 1 0\n0.5 0.4 0.5  # mid\n1 0 1\n";
  }
  CHECK(load_schedule(path.string()).A(0.25) == Catch::Approx(0.7));
  {
    std::ofstream out(path);
    out << "0 1\n";
  }
  CHECK_THROWS_AS(load_schedule(path.string()), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_schedule("/nonexistent/schedule"), IoError);
}

TEST_CASE("traces and effective s", "[anneal]") {
  const auto t = reverse_trace(0.4, 3, 2);
  REQUIRE(t.size() == 8);
  CHECK(t[0] == Catch::Approx(0.8));
  CHECK(t[2] == Catch::Approx(0.4));
  CHECK(t[3] == 0.4);
  CHECK(t[4] == 0.4);
  CHECK(t[7] == Catch::Approx(1.0));
  const auto f = forward_trace(0.2, 2, 3);
  REQUIRE(f.size() == 5);
  CHECK(f[2] == 0.2);
  CHECK(f[3] == Catch::Approx(0.6));
  CHECK(f[4] == 1.0);
  CHECK(effective_s(0.1, -0.2) == 0.0);
  CHECK(effective_s(0.95, 0.1) == 1.0);
  const std::vector<Offset> offs{{1, -0.04}};
  const auto si = effective_s(0.5, 3, offs);
  CHECK(si[0] == 0.5);
  CHECK(si[1] == Catch::Approx(0.46));
  CHECK(uniform_offsets(std::vector<Qubit>{1, 2}, 0.0).empty());
}

TEST_CASE("slice coupling", "[anneal]") {
  CHECK_FALSE(slice_coupling(0.0, 8.0, 32).has_value());
  const auto k = slice_coupling(1.0, 2.0, 4);
  REQUIRE(k);
  CHECK(*k == Catch::Approx(-0.5 * std::log(std::tanh(0.5))));
  // Weakly driven: K grows as A shrinks.
  CHECK(*slice_coupling(0.01, 2.0, 4) > *k);
}

TEST_CASE("autoscale brings the problem into the hardware range", "[anneal]") {
  const auto p = IsingBuilder(3).add_coupling(0, 1, -4.0).add_field(2, 3.0).build();
  CHECK(autoscale_factor(p) == 4.0);
  const auto q = scale_problem(p, 4.0);
  CHECK(q.coupling(0, 1) == -1.0);
  CHECK(q.field(2) == 0.75);
  CHECK(autoscale_factor(IsingBuilder(2).add_coupling(0, 1, 0.5).build()) == 1.0);
  CHECK(autoscale_factor(IsingBuilder(1).add_field(0, 6.0).build()) == 3.0);
}

TEST_CASE("frozen-schedule sampler matches the Trotter Gibbs distribution", "[anneal]") {
  test::FrozenSystem sys{test::three_qubit_problem(), 0.8, 8.0, 4, {}};
  CHECK(test::pimc_total_variation(sys, 200'000, 1000, 1) < 0.02);
  sys.offsets[1] = -0.1;
  CHECK(test::pimc_total_variation(sys, 200'000, 1000, 2) < 0.03);
  test::FrozenSystem hot{test::three_qubit_problem(), 0.5, 2.0, 4, {{0, 0.1}, {1, -0.1}}};
  CHECK(test::pimc_total_variation(hot, 200'000, 1000, 3) < 0.05);
}

TEST_CASE("oracle distribution sums to one and favours low energy", "[anneal]") {
  test::FrozenSystem sys{IsingBuilder(2).add_coupling(0, 1, -1.0).build(), 0.9, 8.0, 2, {}};
  const auto w = test::exact_distribution(sys);
  double total = 0.0;
  for (double x : w) total += x;
  CHECK(total == Catch::Approx(1.0));
  // All up and all down dominate and are symmetric.
  CHECK(w[0] == Catch::Approx(w[15]));
  CHECK(w[0] > 0.3);
}

TEST_CASE("s* = 1 returns the initial state", "[anneal]") {
  const auto inst = build_instance(InstanceConfig{.rows = 3, .cols = 3, .feature_count = 2, .n_loops = 60}, 1);
  AnnealParams p;
  p.s_star = 1.0;
  p.ramp_sweeps = 5;
  p.hold_sweeps = 10;
  p.slices = 8;
  p.reads = 20;
  p.seed = 4;
  for (const auto& s : reverse_anneal(inst.problem, inst.planted_state, p)) {
    CHECK(s.raw == inst.planted_state);
    CHECK(s.state == inst.planted_state);
    CHECK(s.energy == inst.planted_energy);
  }
}

TEST_CASE("sweep grid is deterministic and thread-count independent", "[anneal]") {
  const auto inst = build_instance(InstanceConfig{.rows = 3, .cols = 3, .feature_count = 2, .n_loops = 60}, 2);
  AnnealParams p;
  p.ramp_sweeps = 4;
  p.hold_sweeps = 10;
  p.slices = 4;
  p.reads = 3;
  p.seed = 17;
  const std::vector<double> sg{0.3, 0.6}, dg{-0.04, 0.0};
  const auto q = inst.feature_qubits();
  p.threads = 1;
  const auto a = sweep_grid(inst.problem, q, inst.planted_state, sg, dg, p);
  p.threads = 4;
  const auto b = sweep_grid(inst.problem, q, inst.planted_state, sg, dg, p);
  REQUIRE(a.samples.size() == 12);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].state == b.samples[i].state);
    CHECK(a.samples[i].energy == b.samples[i].energy);
    CHECK(a.samples[i].energy == energy(inst.problem, a.samples[i].state));
    CHECK(a.samples[i].energy >= inst.planted_energy - 1e-9);
    CHECK(is_local_minimum(IsingObjective{sampled_problem(inst.problem, p)}, a.samples[i].state));
  }
  CHECK(a.samples[5].seed == derive_seed(17, 0, 1, 2));
  CHECK(a.samples[5].s_star == 0.3);
  CHECK(a.samples[5].delta_s == 0.0);

  const std::vector<double> bad{0.3};
  CHECK_THROWS_AS(sweep_grid(inst.problem, q, inst.planted_state, sg, std::vector<double>{0.25}, p),
                  ContractViolation);
  CHECK_THROWS_AS(sweep_grid(inst.problem, q, inst.planted_state, std::vector<double>{1.2}, bad, p),
                  ContractViolation);
}

TEST_CASE("parallel_for visits every index once and forwards errors", "[anneal]") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 4, [](std::size_t i) { require(i != 7, "boom"); }), ContractViolation);
}

TEST_CASE("default grids", "[anneal]") {
  const auto s = default_s_star_grid();
  CHECK(s.size() == 19);
  CHECK(std::is_sorted(s.begin(), s.end()));
  const auto d = default_offset_grid();
  REQUIRE(d.size() == 11);
  CHECK(d.front() == -0.2);
  CHECK(d[4] == -0.04);
  CHECK(d[5] == 0.0);
  CHECK(d.back() == 0.2);
}
