#pragma once

// Instance bundle: <prefix>.ising holds the problem, <prefix>.json the
// planted state, loops, feature records and generation settings.

#include <fstream>
#include <string>

#include "json.hpp"

#include "fgs/errors.hpp"
#include "fgs/ising_io.hpp"
#include "fgs/planted.hpp"

namespace fgs {

namespace detail {

inline nlohmann::json spins_json(std::span<const Spin> z) {
  auto out = nlohmann::json::array();
  for (Spin s : z) out.push_back(static_cast<int>(s));
  return out;
}

inline std::vector<Spin> spins_from(const nlohmann::json& j) {
  std::vector<Spin> out;
  for (const auto& v : j) {
    const int s = v.get<int>();
    if (s != 1 && s != -1) throw IoError("instance sidecar: gauge entries must be +1 or -1");
    out.push_back(static_cast<Spin>(s));
  }
  return out;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const PlantedInstance& inst) {
  using nlohmann::json;
  const auto& c = inst.config;
  json j;
  j["format"] = "fgs-instance-1";
  j["seed"] = inst.seed;
  j["config"] = {{"rows", c.rows},
                 {"cols", c.cols},
                 {"shore", c.shore},
                 {"features", to_string(c.kind)},
                 {"count", c.feature_count},
                 {"softness", c.softness},
                 {"loops", c.n_loops},
                 {"max_loop_len", c.max_loop_len},
                 {"placement_budget", c.placement_budget},
                 {"loop_budget", c.loop_budget}};
  j["n_qubits"] = inst.problem.size();
  j["planted_state"] = inst.planted_state.to_bits();
  j["planted_energy"] = inst.planted_energy;
  auto loops = json::array();
  for (const auto& loop : inst.loops) {
    auto values = json::array();
    for (const auto& t : loop.terms) values.push_back(t.value);
    loops.push_back({{"cycle", loop.cycle}, {"J", values}});
  }
  j["loops"] = loops;
  auto gadgets = json::array();
  for (const auto& g : inst.gadgets)
    gadgets.push_back({{"cell", {g.row, g.col}},
                       {"variant", g.variant == GadgetVariant::locked ? "locked" : "free"},
                       {"path", g.path},
                       {"left_external", g.left_external},
                       {"right_external", g.right_external},
                       {"strengths", g.strengths},
                       {"gauge", detail::spins_json(g.gauge)}});
  j["gadgets"] = gadgets;
  auto chains = json::array();
  for (const auto& ch : inst.chains)
    chains.push_back({{"qubits", ch.qubits},
                      {"soft_start", ch.soft_start},
                      {"softness", ch.softness},
                      {"soft_region", {ch.soft_start, ch.soft_end()}},
                      {"left_external", ch.left_external},
                      {"right_external", ch.right_external},
                      {"gauge", detail::spins_json(ch.gauge)}});
  j["chains"] = chains;
  return j;
}

/// Rebuilds the instance from its sidecar and problem. The problem file is
/// checked against the recorded components.
inline PlantedInstance instance_from_json(const nlohmann::json& j, IsingProblem problem) {
  PlantedInstance inst;
  try {
    if (j.at("format").get<std::string>() != "fgs-instance-1") throw IoError("instance sidecar: unknown format");
    const auto& c = j.at("config");
    inst.config.rows = c.at("rows");
    inst.config.cols = c.at("cols");
    inst.config.shore = c.at("shore");
    inst.config.kind = parse_feature_kind(c.at("features").get<std::string>());
    inst.config.feature_count = c.at("count");
    inst.config.softness = c.at("softness");
    inst.config.n_loops = c.at("loops");
    inst.config.max_loop_len = c.at("max_loop_len");
    inst.config.placement_budget = c.at("placement_budget");
    inst.config.loop_budget = c.at("loop_budget");
    inst.seed = j.at("seed");
    inst.graph = build_chimera(inst.config.rows, inst.config.cols, inst.config.shore);
    if (j.at("n_qubits").get<std::size_t>() != problem.size() || problem.size() != inst.graph.size())
      throw IoError("instance sidecar and problem file disagree on the qubit count");
    inst.planted_state = SpinState::from_bits(j.at("planted_state").get<std::string>());
    inst.planted_energy = j.at("planted_energy");
    for (const auto& l : j.at("loops")) {
      PlantedLoop loop;
      loop.cycle = l.at("cycle").get<std::vector<Qubit>>();
      const auto values = l.at("J").get<std::vector<double>>();
      if (values.size() != loop.cycle.size()) throw IoError("instance sidecar: loop length mismatch");
      for (std::size_t e = 0; e < values.size(); ++e)
        loop.terms.push_back({loop.cycle[e], loop.cycle[(e + 1) % values.size()], values[e]});
      inst.loops.push_back(std::move(loop));
    }
    for (const auto& g : j.at("gadgets")) {
      GadgetSpec spec;
      spec.row = g.at("cell").at(0);
      spec.col = g.at("cell").at(1);
      spec.variant = g.at("variant").get<std::string>() == "locked" ? GadgetVariant::locked : GadgetVariant::free;
      spec.path = g.at("path").get<std::vector<Qubit>>();
      spec.left_external = g.at("left_external");
      spec.right_external = g.at("right_external");
      spec.strengths = g.at("strengths").get<std::vector<double>>();
      spec.gauge = detail::spins_from(g.at("gauge"));
      if (spec.strengths.size() != spec.k() + 1 || spec.gauge.size() != spec.k() + 2)
        throw IoError("instance sidecar: gadget record has inconsistent lengths");
      inst.gadgets.push_back(std::move(spec));
    }
    for (const auto& c2 : j.at("chains")) {
      ChainSpec spec;
      spec.qubits = c2.at("qubits").get<std::vector<Qubit>>();
      spec.soft_start = c2.at("soft_start");
      spec.softness = c2.at("softness");
      spec.left_external = c2.at("left_external");
      spec.right_external = c2.at("right_external");
      spec.gauge = detail::spins_from(c2.at("gauge"));
      if (spec.qubits.size() != kChainQubits || spec.gauge.size() != kChainQubits + 2)
        throw IoError("instance sidecar: chain record has inconsistent lengths");
      spec.potential = soft_potential(spec.soft_start, spec.softness);
      spec.potential_fields = synthesize_fields(spec.potential).h;
      inst.chains.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("instance sidecar: ") + e.what());
  } catch (const ContractViolation& e) {
    throw IoError(std::string("instance sidecar: ") + e.what());
  }
  inst.problem = std::move(problem);
  if (inst.planted_state.size() != inst.problem.size())
    throw IoError("instance sidecar: planted state length does not match the problem");
  return inst;
}

inline void save_instance(const std::string& prefix, const PlantedInstance& inst) {
  save_problem(prefix + ".ising", inst.problem);
  std::ofstream os(prefix + ".json");
  if (!os) throw IoError("cannot open " + prefix + ".json for writing");
  os << instance_to_json(inst).dump(1) << '\n';
  if (!os) throw IoError("failed writing " + prefix + ".json");
}

/// Accepts the bundle prefix or either of its two file names.
inline std::string instance_prefix(std::string path) {
  for (const std::string ext : {".json", ".ising"})
    if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
      return path.substr(0, path.size() - ext.size());
  return path;
}

inline PlantedInstance load_instance(const std::string& path) {
  const auto prefix = instance_prefix(path);
  auto problem = load_problem(prefix + ".ising");
  std::ifstream is(prefix + ".json");
  if (!is) throw IoError("cannot open " + prefix + ".json");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(prefix + ".json: " + e.what());
  }
  return instance_from_json(j, std::move(problem));
}

}  // namespace fgs
