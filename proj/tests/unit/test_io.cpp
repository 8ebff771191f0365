#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fgs/instance_io.hpp"
#include "fgs/samples_io.hpp"
#include "test_support.hpp"

using namespace fgs;

namespace {

std::filesystem::path scratch_dir() {
  auto d = std::filesystem::temp_directory_path() / "fgs_io_test";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("problem text round trip", "[io]") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto p = test::random_dyadic_problem(12, 0.4, rng);
    std::stringstream ss;
    write_problem(ss, p);
    CHECK(read_problem(ss) == p);
  }
  // Values without a short decimal form survive too.
  const auto q = IsingBuilder(4).add_coupling(0, 1, 0.1).add_field(3, 1.0 / 3.0).build();
  std::stringstream sq;
  write_problem(sq, q);
  CHECK(read_problem(sq) == q);
  std::istringstream comments("# header\nn 3\nc 0 2 -1 # tail\n\nf 1 0.5\n");
  const auto p = read_problem(comments);
  CHECK(p.coupling(0, 2) == -1.0);
  CHECK(p.field(1) == 0.5);
}

TEST_CASE("malformed problem files", "[io]") {
  for (const char* bad : {"", "c 0 1 1\n", "n 2\nc 0 5 1\n", "n 2\nn 2\n", "n 2\nx 1\n", "n 2\nf 0\n",
                          "n 2\nc 0 1 1 9\n", "n 2\nc 1 1 1\n"}) {
    std::istringstream is(bad);
    CHECK_THROWS_AS(read_problem(is), IoError);
  }
  CHECK_THROWS_AS(load_problem("/nonexistent/file.ising"), IoError);
}

TEST_CASE("instance bundle round trip", "[io]") {
  const auto dir = scratch_dir();
  for (auto kind : {FeatureKind::none, FeatureKind::locked_gadget, FeatureKind::chain}) {
    InstanceConfig c;
    c.kind = kind;
    c.feature_count = kind == FeatureKind::none ? 0 : 2;
    c.softness = kind == FeatureKind::chain ? 1.0 : 0.0;
    c.n_loops = 100;
    const auto inst = build_instance(c, 12);
    const auto prefix = (dir / ("inst_" + to_string(kind))).string();
    save_instance(prefix, inst);
    for (const auto& path : {prefix, prefix + ".json", prefix + ".ising"}) {
      const auto back = load_instance(path);
      CHECK(back.problem == inst.problem);
      CHECK(back.planted_state == inst.planted_state);
      CHECK(back.planted_energy == inst.planted_energy);
      CHECK(back.seed == 12);
      CHECK(back.kind() == kind);
      CHECK(back.loop_count() == inst.loop_count());
      CHECK(back.feature_count() == inst.feature_count());
      CHECK(back.feature_qubits() == inst.feature_qubits());
      CHECK(certify_planted(back));
    }
  }
  std::ofstream(dir / "broken.ising") << "n 4\n";
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_instance((dir / "broken").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sample file round trip", "[io]") {
  SampleSet set;
  set.instance_id = "inst_3";
  set.s_star_grid = {0.39, 1.0};
  set.offset_grid = {-0.04, 0.0};
  set.params.reads = 2;
  set.params.seed = 99;
  set.params.beta = 7.5;
  Rng rng(3);
  for (std::size_t r = 0; r < 4; ++r) {
    Sample s;
    s.s_star = set.s_star_grid[r / 2];
    s.delta_s = set.offset_grid[r % 2];
    s.read = r;
    s.seed = derive_seed(99, r);
    s.raw = SpinState::random(10, rng);
    s.state = SpinState::random(10, rng);
    s.energy = -3.25 + 0.1 * static_cast<double>(r);
    set.samples.push_back(s);
  }
  std::stringstream ss;
  write_samples(ss, set, {"config deadbeef"});
  const auto back = read_samples(ss);
  CHECK(back.instance_id == "inst_3");
  CHECK(back.s_star_grid == set.s_star_grid);
  CHECK(back.offset_grid == set.offset_grid);
  CHECK(back.params.seed == 99);
  CHECK(back.params.beta == 7.5);
  REQUIRE(back.samples.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(back.samples[r].s_star == set.samples[r].s_star);
    CHECK(back.samples[r].delta_s == set.samples[r].delta_s);
    CHECK(back.samples[r].seed == set.samples[r].seed);
    CHECK(back.samples[r].energy == set.samples[r].energy);
    CHECK(back.samples[r].raw == set.samples[r].raw);
    CHECK(back.samples[r].state == set.samples[r].state);
  }
  for (const char* bad : {"", "fgs-samples 2\n", "fgs-samples 1\nqubits 2\nr 1 0 0 0 0 01 011\n",
                          "fgs-samples 1\nbogus\n", "fgs-samples 1\nqubits 2\nr 1 0 0 0 0 0x 01\n"}) {
    std::istringstream is(bad);
    CHECK_THROWS_AS(read_samples(is), IoError);
  }
}
