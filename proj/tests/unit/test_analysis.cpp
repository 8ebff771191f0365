#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "fgs/analysis.hpp"

using namespace fgs;

namespace {

ClassifiedSample make(double e, std::size_t k, double s, double ds, bool baseline = false) {
  ClassifiedSample c;
  c.relative_energy = e;
  c.k_free = k;
  c.s_star = s;
  c.delta_s = ds;
  c.baseline = baseline;
  c.state = SpinState(1);
  return c;
}

InstanceConfig small_gadgets() {
  InstanceConfig c;
  c.rows = c.cols = 3;
  c.feature_count = 2;
  c.n_loops = 60;
  return c;
}

}  // namespace

TEST_CASE("classification of planted and activated states", "[analysis]") {
  const auto inst = build_instance(small_gadgets(), 4);
  const auto p = classify(inst.planted_state, inst);
  CHECK(p.relative_energy == 0.0);
  CHECK(p.k() == 0);
  const auto base = trivial_baseline(inst);
  REQUIRE(base.size() == 2);
  for (std::size_t j = 0; j < base.size(); ++j) {
    CHECK(base[j].baseline);
    CHECK(base[j].k_free == j + 1);
    CHECK(base[j].relative_energy == 4.0 * static_cast<double>(j + 1));
    CHECK(std::isnan(base[j].s_star));
  }
  auto broken = inst;
  broken.planted_energy += 1.0;
  CHECK_THROWS_AS(classify(inst.planted_state, broken), InvariantBreach);
  CHECK_THROWS_AS(classify(SpinState(3), inst), ContractViolation);
}

TEST_CASE("classification of chain states", "[analysis]") {
  InstanceConfig c;
  c.kind = FeatureKind::chain;
  c.feature_count = 2;
  c.n_loops = 80;
  const auto inst = build_instance(c, 6);
  const auto base = trivial_baseline(inst);
  REQUIRE(base.size() == 2);
  CHECK(base[1].k_soft == 2);
  CHECK(base[1].relative_energy == 4.0);
  auto s = inst.planted_state;
  s.flip(inst.chains[0].qubits[7]);
  const auto r = classify(s, inst);
  CHECK(r.invalid_chains == 1);
  CHECK(r.k_soft == 0);
}

TEST_CASE("heatmap fractions", "[analysis]") {
  std::vector<ClassifiedSample> v{make(0, 0, 0.5, 0), make(1, 1, 0.5, 0), make(1, 1, 0.5, 0), make(2, 2, 0.5, 0),
                                  make(0, 0, 0.7, 0), make(3, 3, 0.7, -0.04), make(9, 4, 0.7, 0, true)};
  const auto h = heatmap(v);
  CHECK(h.s_values == std::vector<double>{0.5, 0.7});
  CHECK(h.k_max == 3);
  CHECK(h.fractions[0] == std::vector<double>{0.25, 0.5, 0.25, 0.0});
  CHECK(h.fractions[1] == std::vector<double>{0.5, 0.0, 0.0, 0.5});
  CHECK(h.column_mean[0] == 1.0);
  CHECK(h.column_reads[1] == 2);
  CHECK(h.cell_lo[0] == Catch::Approx(0.4));
  CHECK(h.cell_hi[0] == Catch::Approx(0.6));
  CHECK(h.cell_hi[1] == Catch::Approx(0.8));
  const auto h0 = heatmap(v, 0.0);
  CHECK(h0.k_max == 2);
  CHECK(h0.fractions[1] == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(heatmap(std::vector<ClassifiedSample>{}), ContractViolation);
}

TEST_CASE("conditional best picks uniformly among ties", "[analysis]") {
  std::vector<ClassifiedSample> v{make(2, 1, 0.3, 0), make(2, 1, 0.5, 0), make(2 + 1e-12, 1, 0.6, 0),
                                  make(3, 1, 0.8, 0), make(1, 2, 0.8, 0)};
  Rng rng(1);
  std::map<double, int> picks;
  for (int t = 0; t < 3000; ++t) {
    const auto r = conditional_best(v, 1, rng);
    REQUIRE(r);
    CHECK(r->energy == 2.0);
    CHECK(r->tied == std::vector<std::size_t>{0, 1, 2});
    ++picks[r->s_star];
  }
  REQUIRE(picks.size() == 3);
  for (const auto& [s, n] : picks) CHECK(std::abs(n - 1000) < 150);
  CHECK(conditional_best(v, 2, rng)->cost_per_feature == 0.5);
  CHECK_FALSE(conditional_best(v, 3, rng));
}

TEST_CASE("optimal s* takes the largest tied value", "[analysis]") {
  std::vector<ClassifiedSample> v{make(1, 2, 0.39, 0), make(1, 2, 0.45, -0.04), make(1, 2, 0.42, 0.08),
                                  make(3, 2, 0.6, -0.2), make(1, 2, 1.0, 0, true), make(0, 1, 0.3, 0.12)};
  CHECK(optimal_s_star(v, 2) == 0.45);
  CHECK(optimal_offset(v, 2) == -0.04);
  CHECK(optimal_s_star(v, 1) == 0.3);
  CHECK(optimal_offset(v, 1) == 0.12);
  CHECK_FALSE(optimal_s_star(v, 5));
  // Only the zero-offset arm.
  CHECK(optimal_s_star(v, 2, {false, 0.0}) == 0.39);
  CHECK(optimal_offset(v, 2, {false, 0.0}) == 0.0);
}

TEST_CASE("best with offsets never exceeds best without", "[analysis]") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<ClassifiedSample> v;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i)
      v.push_back(make(static_cast<double>(rng.below(10)), rng.below(4), 0.3 + 0.1 * static_cast<double>(rng.below(5)),
                       0.04 * (static_cast<double>(rng.below(5)) - 2.0), rng.below(10) == 0));
    for (std::size_t k = 0; k < 4; ++k) {
      const auto with = conditional_best(v, k, rng);
      const auto without = conditional_best(v, k, rng, {true, 0.0});
      if (without) {
        REQUIRE(with);
        CHECK(with->energy <= without->energy);
      }
    }
  }
}

TEST_CASE("summary statistics across instances", "[analysis]") {
  std::vector<std::vector<std::optional<double>>> vals{{0.0, 2.0, 3.0}, {0.0, 4.0}, {0.0, std::nullopt, 5.0}};
  const auto rows = summarize(vals);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].n == 2);
  CHECK(rows[1].mean == 3.0);
  CHECK(*rows[1].stderr_ == Catch::Approx(1.0));  // sd sqrt(2) over sqrt(2)
  CHECK(rows[0].stderr_ == 0.0);
  CHECK(rows[2].mean == 4.0);
  const auto single = summarize({{1.0}});
  CHECK_FALSE(single[0].stderr_);
}

TEST_CASE("statistics helpers", "[analysis]") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(mean(x) == 2.5);
  CHECK(sample_stddev(x) == Catch::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(standard_error(x) == Catch::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963985) == Catch::Approx(0.975).margin(1e-6));
  CHECK(confidence_positive(std::vector<double>{1, 1, 1}) == 1.0);
  CHECK(confidence_positive(std::vector<double>{-1, 1}) == 0.5);

  Rng rng(2);
  std::vector<std::vector<double>> hi, lo, same;
  for (int g = 0; g < 10; ++g) {
    hi.push_back({});
    lo.push_back({});
    for (int r = 0; r < 50; ++r) {
      hi.back().push_back(1.0 + rng.uniform());
      lo.back().push_back(rng.uniform());
    }
  }
  CHECK(bootstrap_confidence_positive(hi, lo, 500, rng) == 1.0);
  CHECK(bootstrap_confidence_positive(lo, hi, 500, rng) == 0.0);
  const double c = bootstrap_confidence_positive(lo, lo, 2000, rng);
  CHECK(c > 0.2);
  CHECK(c < 0.8);
  CHECK_THROWS_AS(bootstrap_confidence_positive(hi, {}, 10, rng), ContractViolation);
}

TEST_CASE("provenance hash and csv layout", "[analysis]") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");

  std::vector<ClassifiedSample> v{make(0, 0, 0.5, 0), make(2, 1, 0.5, 0)};
  std::ostringstream h;
  write_heatmap_csv(h, heatmap(v), "all", {"config abc", "seed 1"});
  CHECK(h.str().rfind("# config abc\n# seed 1\ns_star,k,fraction,", 0) == 0);

  Rng rng(0);
  std::ostringstream c;
  write_conditional_csv(c, {{"i0", "offsets", *conditional_best(v, 0, rng), 0.5, 0.0}}, {});
  CHECK(c.str() == "instance,k,E,cost,s_star,delta_s,mode,source,optimal_s_star,optimal_delta_s\n"
                   "i0,0,0,,0.5,0,offsets,sampler,0.5,0\n");
}
