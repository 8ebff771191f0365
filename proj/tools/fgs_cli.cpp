// fgs: generate planted instances, reverse-anneal them with the PIMC sampler,
// analyze the reads, and run the penalty use case.
//
// Exit codes: 0 success, 1 invalid input or parameters, 2 I/O error,
// 3 internal invariant breach.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "fgs/analysis.hpp"
#include "fgs/anneal.hpp"
#include "fgs/instance_io.hpp"
#include "fgs/penalty.hpp"
#include "fgs/samples_io.hpp"
#include "fgs/verify.hpp"

namespace fs = std::filesystem;
using namespace fgs;

namespace {

struct GenOptions {
  std::string features = "gadget-free";
  std::size_t count = 4;
  std::string grid = "4x4";
  std::size_t shore = 4;
  double softness = 0.0;
  std::size_t loops = 300;
  std::size_t max_loop = 5;
  std::size_t instances = 1;
  std::uint64_t seed = 1;
  std::string out;
};

struct AnnealOptions {
  std::string instance;
  std::vector<double> s_grid = default_s_star_grid();
  std::vector<double> d_grid = default_offset_grid();
  std::size_t reads = 1000;
  std::size_t ramp = 250;
  std::size_t hold = 1000;
  std::size_t slices = 32;
  double beta = 8.0;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  bool no_autoscale = false;
  std::string schedule;
  std::string out;
};

struct AnalyzeOptions {
  std::vector<std::string> samples;
  std::string instance;
  bool inject_trivial = false;
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct UsecaseOptions {
  std::vector<std::string> instances;
  std::vector<std::string> samples;
  bool dickson = false;
  double epsilon = 0.125;
  std::vector<double> lambdas = default_lambda_grid();
  std::size_t n_refs = 300;
  std::string units = "hardware";
  bool inject_trivial = false;
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct VerifyOptions {
  std::vector<int> only;
  std::uint64_t seed = verify::Settings{}.seed;
};

/// Every effective option value of a subcommand, hashed for provenance.
std::vector<std::string> provenance(const CLI::App& sub, std::uint64_t seed) {
  const std::string effective = sub.config_to_str(true, false);
  return {"fgs " + sub.get_name(), "config " + hex64(fnv1a(effective)), "seed " + std::to_string(seed)};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

fs::path output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) output_dir(parent.string());
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& g) {
  std::size_t m = 0, n = 0;
  char x = 0;
  std::istringstream is(g);
  if (!(is >> m >> x >> n) || x != 'x' || !is.eof() || m == 0 || n == 0)
    throw ContractViolation("--grid expects MxN with positive M and N, got '" + g + "'");
  return {m, n};
}

int cmd_gen(const GenOptions& o) {
  InstanceConfig cfg;
  std::tie(cfg.rows, cfg.cols) = parse_grid(o.grid);
  cfg.shore = o.shore;
  cfg.kind = parse_feature_kind(o.features);
  cfg.feature_count = cfg.kind == FeatureKind::none ? 0 : o.count;
  cfg.softness = o.softness;
  cfg.n_loops = o.loops;
  cfg.max_loop_len = o.max_loop;
  require(o.instances >= 1, "--instances must be at least 1");
  ensure_parent(o.out);
  bool all_certified = true;
  for (std::size_t i = 0; i < o.instances; ++i) {
    const std::uint64_t seed = o.instances == 1 ? o.seed : derive_seed(o.seed, i);
    const auto prefix = o.instances == 1 ? o.out : o.out + "_" + std::to_string(i);
    const auto inst = build_instance(cfg, seed);
    save_instance(prefix, inst);
    const auto cert = certify_planted_report(inst);
    all_certified = all_certified && cert.ok;
    std::cout << prefix << ": " << inst.problem.size() << " qubits, " << inst.loop_count() << " loops, "
              << inst.feature_count() << " features, planted energy " << format_real(inst.planted_energy)
              << ", certificate " << (cert.ok ? "ok" : "FAILED: " + cert.reason) << '\n';
  }
  if (!all_certified) throw InvariantBreach("generated instance failed its planted-state certificate");
  return 0;
}

int cmd_anneal(const AnnealOptions& o, const CLI::App& sub) {
  const auto inst = load_instance(o.instance);
  AnnealParams p;
  p.reads = o.reads;
  p.ramp_sweeps = o.ramp;
  p.hold_sweeps = o.hold;
  p.slices = o.slices;
  p.beta = o.beta;
  p.seed = o.seed;
  p.threads = o.threads;
  p.autoscale = !o.no_autoscale;
  const Schedule schedule = o.schedule.empty() ? Schedule{} : load_schedule(o.schedule);
  const auto qubits = inst.feature_qubits();
  auto set = sweep_grid(inst.problem, qubits, inst.planted_state, o.s_grid, o.d_grid, p, schedule);
  set.instance_id = instance_prefix(o.instance);
  ensure_parent(o.out);
  save_samples(o.out, set, provenance(sub, o.seed));
  std::cout << o.out << ": " << set.samples.size() << " reads over " << o.s_grid.size() << " x " << o.d_grid.size()
            << " grid points\n";
  return 0;
}

struct Analysed {
  std::string id;
  PlantedInstance inst;
  std::vector<ClassifiedSample> samples;
};

int cmd_analyze(const AnalyzeOptions& o, const CLI::App& sub) {
  require(o.instance.empty() || o.samples.size() == 1, "--instance applies to a single sample file");
  std::vector<Analysed> runs;
  std::set<double> offsets;
  for (const auto& path : o.samples) {
    const auto set = load_samples(path);
    const std::string ipath = o.instance.empty() ? set.instance_id : o.instance;
    if (ipath.empty() || ipath == "-") throw IoError(path + ": no instance recorded; pass --instance");
    Analysed a{fs::path(instance_prefix(ipath)).filename().string(), load_instance(ipath), {}};
    if (!set.samples.empty() && set.samples.front().state.size() != a.inst.problem.size())
      throw IoError(path + ": sample length does not match instance " + ipath);
    a.samples = classify_all(set, a.inst);
    if (o.inject_trivial) {
      const auto base = trivial_baseline(a.inst);
      a.samples.insert(a.samples.end(), base.begin(), base.end());
    }
    offsets.insert(set.offset_grid.begin(), set.offset_grid.end());
    runs.push_back(std::move(a));
  }
  const auto dir = output_dir(o.out_dir);
  const auto prov = provenance(sub, o.seed);

  // Heatmap over all reads, and over the zero-offset arm when present.
  std::vector<ClassifiedSample> pooled;
  for (const auto& r : runs) pooled.insert(pooled.end(), r.samples.begin(), r.samples.end());
  {
    auto os = open_out(dir / "heatmap.csv");
    std::ostringstream body;
    write_heatmap_csv(body, heatmap(pooled), "all", prov);
    if (offsets.contains(0.0) && offsets.size() > 1) {
      std::ostringstream zero;
      write_heatmap_csv(zero, heatmap(pooled, 0.0), "0", {});
      const auto z = zero.str();
      body << z.substr(z.find('\n') + 1);
    }
    os << body.str();
  }

  std::vector<ConditionalRow> rows;
  std::map<std::string, std::vector<std::vector<std::optional<double>>>> series;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    Rng rng(derive_seed(o.seed, i));
    const std::size_t k_max = r.inst.feature_count();
    for (const auto& [mode, filter] : {std::pair<std::string, SampleFilter>{"offsets", {true, std::nullopt}},
                                       std::pair<std::string, SampleFilter>{"no_offsets", {true, 0.0}}}) {
      auto& energies = series["energy_" + mode];
      auto& costs = series["cost_" + mode];
      energies.emplace_back(k_max + 1);
      costs.emplace_back(k_max + 1);
      const SampleFilter sampler_only{false, filter.only_delta_s};
      for (std::size_t k = 0; k <= k_max; ++k) {
        const auto rec = conditional_best(r.samples, k, rng, filter);
        if (!rec) continue;
        energies.back()[k] = rec->energy;
        if (k > 0) costs.back()[k] = rec->cost_per_feature;
        rows.push_back({r.id, mode, *rec, optimal_s_star(r.samples, k, sampler_only),
                        optimal_offset(r.samples, k, sampler_only)});
      }
    }
    if (o.inject_trivial) {
      auto& triv = series["energy_trivial"];
      triv.emplace_back(k_max + 1);
      triv.back()[0] = 0.0;
      for (const auto& c : r.samples)
        if (c.baseline) triv.back()[c.k()] = c.relative_energy;
    }
  }
  {
    auto os = open_out(dir / "conditional.csv");
    write_conditional_csv(os, rows, prov);
  }
  {
    std::vector<std::pair<std::string, std::vector<SummaryRow>>> parts;
    for (const auto& [name, values] : series) parts.emplace_back(name, summarize(values));
    auto os = open_out(dir / "summary.csv");
    write_summary_csv(os, parts, prov);
  }
  std::cout << "wrote heatmap.csv, conditional.csv, summary.csv to " << dir.string() << '\n';
  return 0;
}

int cmd_usecase(const UsecaseOptions& o, const CLI::App& sub) {
  const auto dir = output_dir(o.out_dir);
  const auto prov = provenance(sub, o.seed);
  if (o.dickson) {
    const auto t = flexibility_tradeoff_16(o.lambdas, o.n_refs, o.seed, o.epsilon);
    auto os = open_out(dir / "tradeoff16.csv");
    write_tradeoff_csv(os, t, prov);
    std::cout << "wrote tradeoff16.csv to " << dir.string() << '\n';
    return 0;
  }
  require(!o.instances.empty(), "usecase needs instance paths (or --dickson)");
  require(o.samples.size() == o.instances.size(), "--samples must list one sample file per instance");
  require(o.units == "hardware" || o.units == "raw", "--lambda-units must be 'hardware' or 'raw'");
  std::vector<std::pair<std::string, UsecaseResult>> results;
  for (std::size_t i = 0; i < o.instances.size(); ++i) {
    const auto inst = load_instance(o.instances[i]);
    const auto set = load_samples(o.samples[i]);
    auto cs = classify_all(set, inst);
    if (o.inject_trivial) {
      const auto base = trivial_baseline(inst);
      cs.insert(cs.end(), base.begin(), base.end());
    }
    Rng rng(derive_seed(o.seed, 0, i));
    const auto starts = k_starts(cs, inst.feature_count(), rng);
    for (std::size_t k = 0; k <= inst.feature_count(); ++k)
      if (std::none_of(starts.begin(), starts.end(), [&](const KStart& s) { return s.k == k; }))
        std::cerr << o.instances[i] << ": no record with k = " << k << ", curve skipped\n";
    if (starts.empty()) continue;
    const double scale = o.units == "hardware" ? autoscale_factor(inst.problem) : 1.0;
    results.emplace_back(fs::path(instance_prefix(o.instances[i])).filename().string(),
                         usecase_pipeline(inst, starts, o.lambdas, o.n_refs, derive_seed(o.seed, 1, i), scale));
  }
  {
    auto os = open_out(dir / "usecase.csv");
    write_usecase_csv(os, results, prov);
  }
  {
    auto os = open_out(dir / "optimalk.csv");
    write_optimal_k_csv(os, results, prov);
  }
  {
    auto os = open_out(dir / "optimalk_counts.csv");
    write_optimal_k_counts_csv(os, results, prov);
  }
  std::cout << "wrote usecase.csv, optimalk.csv, optimalk_counts.csv to " << dir.string() << '\n';
  return 0;
}

int cmd_verify(const VerifyOptions& o) {
  verify::Settings st;
  st.seed = o.seed;
  const std::set<int> only(o.only.begin(), o.only.end());
  std::size_t failed = 0;
  verify::run(st, only, [&](const verify::Outcome& out) {
    std::cout << verify::format_line(out) << std::endl;
    failed += !out.pass;
  });
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planted Ising instances, reverse annealing with anneal offsets, and penalty search"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Config file of key = value lines under [gen], [anneal], ... sections");

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate planted instances (problem file + JSON sidecar)");
  g->add_option("--features", gen.features, "none, gadget-free, gadget-locked or chain")->capture_default_str();
  g->add_option("--count", gen.count, "Features per instance")->capture_default_str();
  g->add_option("--grid", gen.grid, "Unit-cell grid MxN")->capture_default_str();
  g->add_option("--shore", gen.shore, "Qubits per unit-cell side")->capture_default_str();
  g->add_option("--softness", gen.softness, "Chain soft-region slope, 0 to 1")->capture_default_str();
  g->add_option("--loops", gen.loops, "Frustrated loops to plant")->capture_default_str();
  g->add_option("--max-loop", gen.max_loop, "Longest loop walk")->capture_default_str();
  g->add_option("--instances", gen.instances, "Number of instances; more than one appends _<i>")
      ->capture_default_str();
  g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output prefix (writes <prefix>.ising and <prefix>.json)")->required();

  AnnealOptions an;
  auto* a = app.add_subcommand("anneal", "Reverse-anneal an instance from its planted state over an (s*, ds) grid");
  a->add_option("instance", an.instance, "Instance prefix or file")->required();
  a->add_option("--s-star-grid", an.s_grid, "Comma-separated s* values")->delimiter(',')->capture_default_str();
  a->add_option("--offset-grid", an.d_grid, "Comma-separated anneal offsets applied to feature qubits")
      ->delimiter(',')
      ->capture_default_str();
  a->add_option("--reads", an.reads, "Reads per grid point")->capture_default_str();
  a->add_option("--ramp-sweeps", an.ramp, "Sweeps for each ramp")->capture_default_str();
  a->add_option("--hold-sweeps", an.hold, "Sweeps held at s*")->capture_default_str();
  a->add_option("--slices", an.slices, "Trotter slices")->capture_default_str();
  a->add_option("--beta", an.beta, "Inverse temperature")->capture_default_str();
  a->add_option("--seed", an.seed, "Master seed")->capture_default_str();
  a->add_option("--threads", an.threads, "Worker threads, 0 for all cores")->capture_default_str();
  a->add_flag("--no-autoscale", an.no_autoscale, "Sample the problem without range normalization");
  a->add_option("--schedule-table", an.schedule, "File of 's A B' rows replacing A = 1 - s, B = s");
  a->add_option("--out", an.out, "Sample file to write")->required();

  AnalyzeOptions az;
  auto* z = app.add_subcommand("analyze", "Classify reads and write heatmap, conditional and summary CSVs");
  z->add_option("samples", az.samples, "Sample files")->required();
  z->add_option("--instance", az.instance, "Instance for a single sample file (default: recorded path)");
  z->add_flag("--inject-trivial", az.inject_trivial, "Add the hand-made baseline states");
  z->add_option("--seed", az.seed, "Seed for tie draws")->capture_default_str();
  z->add_option("--out-dir", az.out_dir, "Directory for the CSV files")->required();

  UsecaseOptions uc;
  auto* u = app.add_subcommand("usecase", "Penalty-search use case, or the 16-qubit tradeoff with --dickson");
  u->add_option("instances", uc.instances, "Instance paths");
  u->add_option("--samples", uc.samples, "Sample file for each instance")->delimiter(',');
  u->add_flag("--dickson", uc.dickson, "Run the 16-qubit two-minima tradeoff instead");
  u->add_option("--epsilon", uc.epsilon, "Ring field offset of the 16-qubit instance")->capture_default_str();
  u->add_option("--lambda", uc.lambdas, "Comma-separated penalty strengths")->delimiter(',')->capture_default_str();
  u->add_option("--lambda-units", uc.units, "hardware (scaled like the sampler's problem) or raw")
      ->capture_default_str();
  u->add_option("--n-refs", uc.n_refs, "Random reference states per point")->capture_default_str();
  u->add_flag("--inject-trivial", uc.inject_trivial, "Add the hand-made baseline states as starts");
  u->add_option("--seed", uc.seed, "Master seed")->capture_default_str();
  u->add_option("--out-dir", uc.out_dir, "Directory for the CSV files")->required();

  VerifyOptions vf;
  auto* v = app.add_subcommand("verify", "Run the acceptance checks");
  v->add_option("--only", vf.only, "Comma-separated criterion numbers")->delimiter(',');
  v->add_option("--seed", vf.seed, "Master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*a) return cmd_anneal(an, *a);
    if (*z) return cmd_analyze(az, *z);
    if (*u) return cmd_usecase(uc, *u);
    if (*v) return cmd_verify(vf);
  } catch (const IoError& e) {
    std::cerr << "fgs: " << e.what() << '\n';
    return 2;
  } catch (const InvariantBreach& e) {
    std::cerr << "fgs: internal error: " << e.what() << '\n';
    return 3;
  } catch (const ContractViolation& e) {
    std::cerr << "fgs: " << e.what() << '\n';
    return 1;
  } catch (const BudgetExhausted& e) {
    std::cerr << "fgs: " << e.what() << " (try fewer features, fewer loops or a larger grid)\n";
    return 1;
  }
  return 0;
}
