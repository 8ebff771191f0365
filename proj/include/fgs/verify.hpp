#pragma once

// Property and trend checks run by the acceptance binary and `fgs verify`.
// Every check uses fixed seeds derived from one master seed, so a run is
// reproducible; the sampler settings are desk scale (see README).

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fgs/analysis.hpp"
#include "fgs/anneal.hpp"
#include "fgs/penalty.hpp"
#include "fgs/planted.hpp"
#include "fgs/stats.hpp"

namespace fgs::verify {

struct Settings {
  std::uint64_t seed = 20190611;
  std::size_t slices = 16;
  double beta = 8.0;
  std::size_t ramp_sweeps = 25;
  std::size_t hold_sweeps = 100;
  std::size_t threads = 0;
};

struct Result {
  bool pass = false;
  std::string details;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Result(const Settings&)> run;
};

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string details;
  double seconds;
};

namespace detail {

inline std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

inline AnnealParams anneal_params(const Settings& s, std::size_t reads, std::uint64_t seed) {
  AnnealParams p;
  p.slices = s.slices;
  p.beta = s.beta;
  p.ramp_sweeps = s.ramp_sweeps;
  p.hold_sweeps = s.hold_sweeps;
  p.threads = s.threads;
  p.reads = reads;
  p.seed = seed;
  return p;
}

inline InstanceConfig desk(FeatureKind kind, std::size_t features) {
  InstanceConfig c;
  c.kind = kind;
  c.feature_count = features;
  return c;
}

/// Chain in its own frame: qubits 0..14, externals 15 and 16, no gauge.
inline ChainSpec canonical_chain(std::size_t a, double softness) {
  ChainSpec s;
  for (Qubit q = 0; q < kChainQubits; ++q) s.qubits.push_back(q);
  s.soft_start = a;
  s.softness = softness;
  s.potential = soft_potential(a, softness);
  s.potential_fields = synthesize_fields(s.potential).h;
  s.left_external = static_cast<Qubit>(kChainQubits);
  s.right_external = static_cast<Qubit>(kChainQubits + 1);
  s.gauge.assign(kChainQubits + 2, 1);
  return s;
}

/// Slice-configuration probabilities at frozen s under the default schedule,
/// by enumeration; bit k * n + i is set when spin i of slice k is -1.
inline std::vector<double> trotter_distribution(const IsingProblem& p, double s, double beta, std::size_t slices,
                                                const std::map<Qubit, double>& offsets) {
  const std::size_t n = p.size(), m = n * slices;
  require(m <= 20, "trotter_distribution: too many spins to enumerate");
  auto s_of = [&](Qubit i) {
    const auto it = offsets.find(i);
    return it == offsets.end() ? s : effective_s(s, it->second);
  };
  auto b_of = [&](Qubit i, Qubit j) {
    const bool oi = offsets.contains(i), oj = offsets.contains(j);
    if (oi && oj) return 0.5 * (s_of(i) + s_of(j));
    if (oi) return s_of(i);
    if (oj) return s_of(j);
    return s;
  };
  std::vector<double> lw(std::size_t{1} << m);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < lw.size(); ++c) {
    auto z = [&](std::size_t k, Qubit i) { return (c >> (k * n + i)) & 1 ? -1.0 : 1.0; };
    double w = 0.0;
    for (std::size_t k = 0; k < slices; ++k) {
      double e = 0.0;
      for (Qubit i = 0; i < n; ++i) e += p.field(i) * s_of(i) * z(k, i);
      for (const auto& cp : p.couplers()) e += cp.value * b_of(cp.i, cp.j) * z(k, cp.i) * z(k, cp.j);
      w -= beta / static_cast<double>(slices) * e;
    }
    for (Qubit i = 0; i < n; ++i) {
      const double kk = -0.5 * std::log(std::tanh(beta * (1.0 - s_of(i)) / static_cast<double>(slices)));
      for (std::size_t k = 0; k < slices; ++k) w += kk * z(k, i) * z((k + 1) % slices, i);
    }
    lw[c] = w;
    top = std::max(top, w);
  }
  double total = 0.0;
  for (auto& w : lw) total += w = std::exp(w - top);
  for (auto& w : lw) w /= total;
  return lw;
}

inline double sampler_total_variation(const IsingProblem& p, double s, double beta, std::size_t slices,
                                      const std::map<Qubit, double>& offsets, std::size_t sweeps,
                                      std::uint64_t seed) {
  const auto exact = trotter_distribution(p, s, beta, slices, offsets);
  std::vector<Offset> offs;
  for (const auto& [q, ds] : offsets) offs.push_back({q, ds});
  const Schedule schedule;
  PimcChain chain(p, slices, beta, schedule, offs);
  Rng rng(seed);
  chain.randomize(rng);
  chain.set_s(s);
  for (int t = 0; t < 1000; ++t) chain.sweep(rng);
  std::vector<double> counts(exact.size(), 0.0);
  for (std::size_t t = 0; t < sweeps; ++t) {
    chain.sweep(rng);
    std::size_t c = 0;
    for (std::size_t k = 0; k < slices; ++k)
      for (Qubit i = 0; i < p.size(); ++i)
        if (chain.spin(k, i) == -1) c |= std::size_t{1} << (k * p.size() + i);
    counts[c] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) tv += std::abs(counts[c] / static_cast<double>(sweeps) - exact[c]);
  return 0.5 * tv;
}

inline std::vector<double> hamming_to_planted(const std::vector<Sample>& reads, const PlantedInstance& inst) {
  const auto active = inst.active_qubits();
  std::vector<double> out;
  for (const auto& r : reads) {
    std::size_t d = 0;
    for (Qubit q : active) d += r.state[q] != inst.planted_state[q];
    out.push_back(static_cast<double>(d));
  }
  return out;
}

/// k_free of every read at grid point (s*, ds), or empty when absent.
inline std::vector<double> k_free_at(const std::vector<ClassifiedSample>& cs, double s_star, double ds) {
  std::vector<double> out;
  for (const auto& c : cs)
    if (!c.baseline && std::abs(c.s_star - s_star) < 1e-12 && std::abs(c.delta_s - ds) < 1e-12)
      out.push_back(static_cast<double>(c.k_free));
  return out;
}

inline double group_mean(const std::vector<std::vector<double>>& groups) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups)
    for (double x : g) s += x, ++n;
  return s / static_cast<double>(n);
}

}  // namespace detail

inline Result planted_certificate(const Settings& st) {
  std::size_t certified = 0, exact = 0, total = 0;
  std::string first_failure;
  auto check = [&](const InstanceConfig& cfg, std::uint64_t seed) {
    const auto inst = build_instance(cfg, seed);
    ++total;
    const auto cert = certify_planted_report(inst);
    certified += cert.ok;
    double bookkeeping = 0.0;
    for (const auto& l : inst.loops) bookkeeping -= static_cast<double>(l.cycle.size()) - 2.0;
    for (const auto& g : inst.gadgets) bookkeeping += feature_ground_energy(g);
    for (const auto& c : inst.chains) bookkeeping += feature_ground_energy(c);
    const bool same = energy(inst.problem, inst.planted_state) == bookkeeping && inst.planted_energy == bookkeeping;
    exact += same;
    if ((!cert.ok || !same) && first_failure.empty())
      first_failure = "; first failure: seed " + std::to_string(seed) + " " + (cert.ok ? "energy mismatch" : cert.reason);
  };
  const FeatureKind kinds[] = {FeatureKind::none, FeatureKind::free_gadget, FeatureKind::locked_gadget,
                               FeatureKind::chain};
  for (std::size_t i = 0; i < 49; ++i) {
    const auto kind = kinds[i % 4];
    check(detail::desk(kind, kind == FeatureKind::none ? 0 : 4), derive_seed(st.seed, 1, i));
  }
  InstanceConfig big;
  big.rows = big.cols = 16;
  big.feature_count = 15;
  big.n_loops = 8000;
  check(big, derive_seed(st.seed, 1, 49));
  return {certified == total && exact == total, std::to_string(certified) + "/" + std::to_string(total) +
                                                    " certified, " + std::to_string(exact) + "/" +
                                                    std::to_string(total) + " exact energy" + first_failure};
}

inline Result gadget_properties(const Settings& st) {
  const ChimeraGraph g(4, 4, 4);
  std::vector<std::string> bad;
  std::map<std::string, std::size_t> sizes;
  for (auto v : {GadgetVariant::free, GadgetVariant::locked}) {
    Rng rng(derive_seed(st.seed, 2));
    auto spec = *build_gadget(g, 1, 2, v, rng);
    spec.left_external = 0;
    spec.path = {1, 2, 3, 4};
    spec.right_external = 5;
    IsingBuilder b(6);
    for (Qubit t = 0; t < 5; ++t) b.add_coupling(t, t + 1, -spec.strengths[t]);
    const auto six = b.build();
    const std::string tag = v == GadgetVariant::free ? "free" : "locked";
    std::map<std::pair<int, int>, double> ground;
    for (Spin zl : {Spin{1}, Spin{-1}})
      for (Spin zr : {Spin{1}, Spin{-1}}) {
        double best = std::numeric_limits<double>::infinity();
        std::set<std::vector<Spin>> arg;
        for_each_state(six, [&](const SpinState& s, double e) {
          if (s[0] != zl || s[5] != zr) return;
          std::vector<Spin> inner(s.spins().begin() + 1, s.spins().begin() + 5);
          if (e < best - 1e-12) best = e, arg.clear();
          if (std::abs(e - best) <= 1e-12) arg.insert(inner);
        });
        const auto m = gadget_ground_manifold(spec, zl, zr);
        const std::set<std::vector<Spin>> got(m.states.begin(), m.states.end());
        if (got != arg || m.energy != best) bad.push_back(tag + " manifold mismatch");
        ground[{zl, zr}] = m.energy;
        const bool agree = zl == zr;
        sizes[tag + (agree ? " agree" : " disagree")] = m.states.size();
        const std::size_t want = agree || v == GadgetVariant::locked ? 1 : 5;
        if (m.states.size() != want) bad.push_back(tag + " manifold size");
        bool any_free = false;
        for (const auto& z : m.states) {
          SpinState s(6);
          s[0] = zl;
          s[5] = zr;
          for (std::size_t t = 0; t < 4; ++t) s[t + 1] = z[t];
          any_free = any_free || is_free(six, s, spec);
        }
        if (!agree && any_free != (v == GadgetVariant::free)) bad.push_back(tag + " free-flip existence");
        if (agree && any_free) bad.push_back(tag + " free in agree context");
      }
    const double cost = ground[{1, -1}] - ground[{1, 1}];
    const double cost2 = ground[{-1, 1}] - ground[{-1, -1}];
    const double want = v == GadgetVariant::free ? 2.0 : 1.0;
    if (cost != want || cost2 != want) bad.push_back(tag + " disagree cost " + detail::fmt(cost));
  }
  std::string d = "sizes free " + std::to_string(sizes["free agree"]) + "/" + std::to_string(sizes["free disagree"]) +
                  ", locked " + std::to_string(sizes["locked agree"]) + "/" +
                  std::to_string(sizes["locked disagree"]) + "; disagree cost +2 free, +1 locked";
  if (!bad.empty()) d += "; " + bad.front();
  return {bad.empty(), d};
}

inline Result chain_properties(const Settings& st) {
  std::size_t round_trips = 0;
  for (std::size_t x = 0; x < kChainValues; ++x) {
    const auto r = decode_chain(encode_value(x));
    round_trips += r.valid && r.value == x;
  }
  double worst_synth = 0.0;
  bool plateau = true, frustration = true;
  Rng rng(derive_seed(st.seed, 3));
  std::vector<ChainPotential> pots;
  for (int t = 0; t < 50; ++t) {
    ChainPotential p;
    for (auto& v : p) v = 4.0 * rng.uniform() - 2.0;
    pots.push_back(p);
  }
  for (std::size_t a = kSoftStartMin; a <= kSoftStartMax; ++a)
    for (double sf : {0.0, 1.0}) {
      const auto spec = detail::canonical_chain(a, sf);
      pots.push_back(spec.potential);
      const auto h = spec.potential_fields;
      const double base = chain_field_energy(h, encode_value(0));
      for (std::size_t x = 1; x < kChainValues; ++x)
        if (!spec.in_soft_region(x)) plateau = plateau && chain_field_energy(h, encode_value(x)) - base == 2.0;
      frustration = frustration && boundary_frustrations(spec, 0) == 0;
      for (std::size_t x = spec.soft_start; x <= spec.soft_end(); ++x)
        frustration = frustration && boundary_frustrations(spec, x) == 1;
    }
  for (const auto& p : pots) {
    const auto f = synthesize_fields(p);
    for (std::size_t x = 0; x < kChainValues; ++x)
      worst_synth = std::max(worst_synth, std::abs(chain_field_energy(f.h, encode_value(x)) + f.offset - p[x]));
  }
  const bool ok = round_trips == kChainValues && worst_synth <= 1e-12 && plateau && frustration;
  return {ok, "round trip " + std::to_string(round_trips) + "/16, synthesis error " + detail::fmt(worst_synth) +
                  ", plateau gap 2 " + (plateau ? "exact" : "violated") + ", frustration pattern " +
                  (frustration ? "ok" : "violated")};
}

inline Result pimc_stationarity(const Settings& st) {
  const auto p = IsingBuilder(3)
                     .add_coupling(0, 1, -1.0)
                     .add_coupling(1, 2, 0.5)
                     .add_coupling(0, 2, -0.25)
                     .add_field(0, 0.3)
                     .add_field(2, -0.2)
                     .build();
  const double tv_plain = detail::sampler_total_variation(p, 0.8, 8.0, 4, {}, 1'000'000, derive_seed(st.seed, 4, 0));
  const double tv_offset =
      detail::sampler_total_variation(p, 0.8, 8.0, 4, {{1, -0.1}}, 1'000'000, derive_seed(st.seed, 4, 1));
  return {tv_plain <= 1e-2 && tv_offset <= 1e-2, "TV " + detail::fmt(tv_plain) + " (no offset), " +
                                                     detail::fmt(tv_offset) + " (offset on one qubit), 1e6 sweeps"};
}

inline Result protocol_sanity(const Settings& st) {
  const auto inst = build_instance(detail::desk(FeatureKind::free_gadget, 4), derive_seed(st.seed, 5, 0));
  auto p = detail::anneal_params(st, 100, derive_seed(st.seed, 5, 1));
  p.s_star = 1.0;
  std::size_t kept = 0;
  for (const auto& r : reverse_anneal(inst.problem, inst.planted_state, p))
    kept += r.raw == inst.planted_state && r.state == inst.planted_state;
  p.s_star = 0.2;
  p.reads = 400;
  p.seed = derive_seed(st.seed, 5, 2);
  const auto rev = detail::hamming_to_planted(reverse_anneal(inst.problem, inst.planted_state, p), inst);
  p.seed = derive_seed(st.seed, 5, 3);
  const auto fwd = detail::hamming_to_planted(forward_anneal(inst.problem, 0.2, p), inst);
  const double se = std::hypot(standard_error(rev), standard_error(fwd));
  const double gap = std::abs(mean(rev) - mean(fwd));
  return {kept == 100 && gap <= 2.0 * se,
          "s*=1 kept " + std::to_string(kept) + "/100; s*=0.2 Hamming " + detail::fmt(mean(rev), 4) + " vs forward " +
              detail::fmt(mean(fwd), 4) + " (|diff| " + detail::fmt(gap) + ", 2 se " + detail::fmt(2.0 * se) + ")"};
}

inline Result fluctuation_trend(const Settings& st) {
  const std::vector<double> grid{0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.93, 0.95};
  const std::size_t n_inst = 10, pilot_reads = 40, confirm_reads = 300;
  std::vector<PlantedInstance> free_i, locked_i;
  for (std::size_t i = 0; i < n_inst; ++i) {
    free_i.push_back(build_instance(detail::desk(FeatureKind::free_gadget, 4), derive_seed(st.seed, 6, 0, i)));
    locked_i.push_back(build_instance(detail::desk(FeatureKind::locked_gadget, 4), derive_seed(st.seed, 6, 0, i)));
  }
  // Arms: 0 free ds=0, 1 locked ds=0, 2 locked ds=-0.04.
  auto run = [&](const std::vector<double>& s_grid, std::size_t reads, std::uint64_t stream, int arm, std::size_t i) {
    const auto& inst = arm == 0 ? free_i[i] : locked_i[i];
    const double ds = arm == 2 ? -0.04 : 0.0;
    const auto p = detail::anneal_params(st, reads, derive_seed(st.seed, 6, stream, i, arm));
    const auto q = inst.feature_qubits();
    const auto set = sweep_grid(inst.problem, q, inst.planted_state, s_grid, std::vector<double>{ds}, p);
    return classify_all(set, inst);
  };
  // Pilot on its own seeds picks the s* for each comparison.
  std::vector<std::vector<double>> pilot(3, std::vector<double>(grid.size(), 0.0));
  for (int arm = 0; arm < 3; ++arm)
    for (std::size_t i = 0; i < n_inst; ++i) {
      const auto cs = run(grid, pilot_reads, 1, arm, i);
      for (std::size_t a = 0; a < grid.size(); ++a)
        pilot[arm][a] += mean(detail::k_free_at(cs, grid[a], arm == 2 ? -0.04 : 0.0)) / n_inst;
    }
  std::size_t best1 = 0, best2 = 0;
  for (std::size_t a = 1; a < grid.size(); ++a) {
    if (pilot[0][a] - pilot[1][a] > pilot[0][best1] - pilot[1][best1]) best1 = a;
    if (pilot[2][a] - pilot[1][a] > pilot[2][best2] - pilot[1][best2]) best2 = a;
  }
  // Confirmation on fresh seeds.
  auto confirm = [&](int arm, double s) {
    std::vector<std::vector<double>> groups;
    for (std::size_t i = 0; i < n_inst; ++i)
      groups.push_back(detail::k_free_at(run({s}, confirm_reads, 2, arm, i), s, arm == 2 ? -0.04 : 0.0));
    return groups;
  };
  const double s1 = grid[best1], s2 = grid[best2];
  const auto f1 = confirm(0, s1), l1 = confirm(1, s1);
  const auto l2 = s2 == s1 ? l1 : confirm(1, s2);
  const auto o2 = confirm(2, s2);
  Rng rng(derive_seed(st.seed, 6, 3));
  const double c1 = bootstrap_confidence_positive(f1, l1, 2000, rng);
  const double c2 = bootstrap_confidence_positive(o2, l2, 2000, rng);
  return {c1 >= 0.95 && c2 >= 0.95,
          "free vs locked at s*=" + detail::fmt(s1) + ": " + detail::fmt(detail::group_mean(f1)) + " vs " +
              detail::fmt(detail::group_mean(l1)) + " (conf " + detail::fmt(c1, 4) + "); locked ds=-0.04 vs 0 at s*=" +
              detail::fmt(s2) + ": " + detail::fmt(detail::group_mean(o2)) + " vs " +
              detail::fmt(detail::group_mean(l2)) + " (conf " + detail::fmt(c2, 4) + ")"};
}

inline Result conditional_baseline(const Settings& st) {
  const std::vector<double> s_grid{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, d_grid{-0.04, 0.0, 0.04};
  const std::size_t n_inst = 10, k_max = 4;
  std::size_t violations = 0, compared = 0, cheap = 0, cells = 0;
  for (std::size_t i = 0; i < n_inst; ++i) {
    const auto inst = build_instance(detail::desk(FeatureKind::chain, 4), derive_seed(st.seed, 7, 0, i));
    const auto p = detail::anneal_params(st, 200, derive_seed(st.seed, 7, 1, i));
    const auto set = sweep_grid(inst.problem, inst.feature_qubits(), inst.planted_state, s_grid, d_grid, p);
    const auto cs = classify_all(set, inst);
    Rng rng(derive_seed(st.seed, 7, 2, i));
    for (std::size_t k = 0; k <= k_max; ++k) {
      const auto with = conditional_best(cs, k, rng, {false, std::nullopt});
      const auto without = conditional_best(cs, k, rng, {false, 0.0});
      if (without) {
        ++compared;
        if (!with || with->energy > without->energy) ++violations;
      }
      if (k == 0) continue;
      ++cells;
      if (with && with->cost_per_feature <= 2.0 + kEnergyTieTolerance) ++cheap;
    }
  }
  return {violations == 0 && 2 * cheap >= cells,
          "offsets never worse in " + std::to_string(compared - violations) + "/" + std::to_string(compared) +
              " (instance, k); sampler cost per feature <= 2 in " + std::to_string(cheap) + "/" +
              std::to_string(cells) + " cells"};
}

inline Result dickson_spectrum(const Settings&) {
  const auto dk = build_dickson(0.125);
  std::vector<double> e(std::size_t{1} << 16);
  for_each_state(dk.problem, [&](const SpinState& s, double en) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < 16; ++i) idx |= std::size_t(s[i] == -1) << i;
    e[idx] = en;
  });
  std::size_t ground = 0, first = 0, flexible = 0;
  const double lo = *std::min_element(e.begin(), e.end());
  for (std::size_t idx = 0; idx < e.size(); ++idx) {
    if (e[idx] == -17.0) ++ground;
    if (e[idx] != -15.0) continue;
    ++first;
    std::size_t zero = 0;
    for (Qubit q : dk.outer) zero += e[idx ^ (std::size_t{1} << q)] == -15.0;
    flexible += zero == 8;
  }
  return {lo == -17.0 && ground == 1 && first == 256 && flexible == 256,
          "ground " + detail::fmt(lo) + " x" + std::to_string(ground) + ", " + std::to_string(first) +
              " states at -15, " + std::to_string(flexible) + " with 8 zero-cost outer flips"};
}

inline Result tradeoff_16(const Settings& st) {
  const auto grid = default_lambda_grid();
  const auto t = flexibility_tradeoff_16(grid, 10'000, derive_seed(st.seed, 9));
  std::size_t run = 0, best_run = 0, best_end = 0;
  for (std::size_t a = 0; a < t.points.size(); ++a) {
    const auto& p = t.points[a];
    run = p.flexible_mean < p.ground_mean && p.confidence_flexible_better >= 0.99 ? run + 1 : 0;
    if (run > best_run) best_run = run, best_end = a;
  }
  const auto& zero = t.points.front();
  const bool ground_wins = zero.lambda == 0.0 && zero.ground_mean == -17.0 && zero.flexible_mean == -15.0;
  std::string range = best_run == 0 ? "none"
                                    : detail::fmt(grid[best_end + 1 - best_run]) + ".." + detail::fmt(grid[best_end]);
  return {best_run > 0 && ground_wins, "flexible start better at >= 99% for lambda in " + range + " (" +
                                           std::to_string(best_run) + " points); lambda=0: ground " +
                                           detail::fmt(zero.ground_mean) + ", flexible " +
                                           detail::fmt(zero.flexible_mean)};
}

inline Result usecase_trend(const Settings& st) {
  const std::vector<double> s_grid{0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, d_grid{-0.04, 0.0};
  const auto lambdas = default_lambda_grid();
  const std::size_t n_inst = 10;
  auto pipeline = [&](std::string& csv) {
    std::vector<std::pair<std::string, UsecaseResult>> results;
    for (std::size_t i = 0; i < n_inst; ++i) {
      const auto inst = build_instance(detail::desk(FeatureKind::free_gadget, 4), derive_seed(st.seed, 10, 0, i));
      const auto p = detail::anneal_params(st, 30, derive_seed(st.seed, 10, 1, i));
      const auto set = sweep_grid(inst.problem, inst.feature_qubits(), inst.planted_state, s_grid, d_grid, p);
      auto cs = classify_all(set, inst);
      const auto base = trivial_baseline(inst);
      cs.insert(cs.end(), base.begin(), base.end());
      Rng rng(derive_seed(st.seed, 10, 2, i));
      const auto starts = k_starts(cs, inst.feature_count(), rng);
      results.emplace_back("inst" + std::to_string(i),
                           usecase_pipeline(inst, starts, lambdas, 300, derive_seed(st.seed, 10, 3, i),
                                            autoscale_factor(inst.problem)));
    }
    std::ostringstream a, b;
    write_usecase_csv(a, results, {"seed " + std::to_string(st.seed)});
    write_optimal_k_csv(b, results, {"seed " + std::to_string(st.seed)});
    csv = a.str() + b.str();
    return results;
  };
  std::string first, second;
  const auto results = pipeline(first);
  pipeline(second);
  std::size_t zero_ok = 0, best_count = 0;
  double best_lambda = 0.0;
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    std::size_t positive = 0;
    for (const auto& [id, r] : results) {
      if (a == 0) zero_ok += r.optimal_k[0] == 0;
      positive += r.optimal_k[a] > 0;
    }
    if (a > 0 && positive > best_count) best_count = positive, best_lambda = lambdas[a];
  }
  const bool identical = first == second;
  return {zero_ok == n_inst && best_count >= 7 && identical,
          "lambda=0 optimal k=0 for " + std::to_string(zero_ok) + "/10; up to " + std::to_string(best_count) +
              "/10 with optimal k>0 (first at lambda=" + detail::fmt(best_lambda) + "); rerun CSVs " +
              (identical ? "identical" : "differ")};
}

inline Result tie_rules(const Settings&) {
  auto make = [](double e, std::size_t k, double s, double ds, bool baseline = false) {
    ClassifiedSample c;
    c.relative_energy = e;
    c.k_free = k;
    c.s_star = s;
    c.delta_s = ds;
    c.baseline = baseline;
    return c;
  };
  std::vector<std::string> bad;
  // Ties at E=2 across three s* and three ds values; a non-tied better-s* read
  // at higher energy; a baseline tie that must not count.
  const std::vector<ClassifiedSample> a{make(2, 3, 0.39, 0.08), make(2, 3, 0.45, -0.04),
                                        make(2 + 1e-12, 3, 0.42, -0.2), make(2.5, 3, 0.8, -0.2),
                                        make(2, 3, 1.0, -0.2, true)};
  if (optimal_s_star(a, 3) != 0.45) bad.push_back("largest s*");
  if (optimal_offset(a, 3) != -0.2) bad.push_back("smallest ds");
  // A single best read fixes both values.
  const std::vector<ClassifiedSample> b{make(1, 1, 0.3, 0.2), make(1.5, 1, 0.6, -0.2)};
  if (optimal_s_star(b, 1) != 0.3 || optimal_offset(b, 1) != 0.2) bad.push_back("unique best");
  // Near ties outside the tolerance do not count.
  const std::vector<ClassifiedSample> c{make(1, 2, 0.4, 0.0), make(1 + 1e-6, 2, 0.5, -0.1)};
  if (optimal_s_star(c, 2) != 0.4 || optimal_offset(c, 2) != 0.0) bad.push_back("tolerance");
  if (optimal_s_star(c, 7)) bad.push_back("missing k");
  return {bad.empty(), bad.empty() ? "largest s*, smallest ds, 1e-9 tie tolerance, baseline excluded"
                                   : "violated: " + bad.front()};
}

inline std::vector<Criterion> criteria() {
  return {
      {1, "planted ground-state certificate", 60, planted_certificate},
      {2, "gadget property suite", 1, gadget_properties},
      {3, "chain suite", 1, chain_properties},
      {4, "PIMC stationarity", 120, pimc_stationarity},
      {5, "protocol sanity", 300, protocol_sanity},
      {6, "fluctuation attraction trend", 1800, fluctuation_trend},
      {7, "conditional-performance baseline", 1800, conditional_baseline},
      {8, "Dickson gadget spectrum", 10, dickson_spectrum},
      {9, "16-qubit tradeoff", 600, tradeoff_16},
      {10, "use-case pipeline", 1800, usecase_trend},
      {11, "tie rules", 1, tie_rules},
  };
}

/// Runs the selected criteria (all when `only` is empty), reporting each as it
/// finishes. A criterion also fails when it exceeds its time limit.
inline std::vector<Outcome> run(const Settings& st, const std::set<int>& only,
                                const std::function<void(const Outcome&)>& report) {
  std::vector<Outcome> out;
  for (const auto& c : criteria()) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run(st);
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome o{c.id, c.name, r.pass && secs <= c.limit_seconds, r.details, secs};
    if (r.pass && secs > c.limit_seconds) o.details += "; over time limit " + detail::fmt(c.limit_seconds) + " s";
    report(o);
    out.push_back(std::move(o));
  }
  return out;
}

inline std::string format_line(const Outcome& o) {
  std::ostringstream os;
  os << (o.pass ? "[PASS] " : "[FAIL] ") << o.id << ". " << o.name << " (" << o.details << "; "
     << detail::fmt(o.seconds, 3) << " s)";
  return os.str();
}

}  // namespace fgs::verify
