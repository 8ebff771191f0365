#pragma once

// Classification of sampled states by how many features are active (free
// gadgets or soft chains), heat-map fractions, and conditional best
// performance with the tie rules: random pick among tied states, largest s*,
// smallest ds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgs/anneal.hpp"
#include "fgs/errors.hpp"
#include "fgs/ising_io.hpp"
#include "fgs/planted.hpp"
#include "fgs/rng.hpp"
#include "fgs/stats.hpp"

namespace fgs {

/// Energies within this distance count as tied.
inline constexpr double kEnergyTieTolerance = 1e-9;

struct ClassifiedSample {
  double relative_energy = 0.0;  // energy minus planted energy
  std::size_t k_free = 0;
  std::size_t k_soft = 0;
  std::size_t invalid_chains = 0;
  double s_star = 1.0;
  double delta_s = 0.0;
  bool baseline = false;  // injected trivial-strategy state, not a sampler read
  SpinState state;

  std::size_t k() const noexcept { return k_free + k_soft; }
};

inline ClassifiedSample classify(const SpinState& state, const PlantedInstance& inst) {
  require(state.size() == inst.problem.size(), "classify: state does not match the instance");
  ClassifiedSample out;
  out.relative_energy = energy(inst.problem, state) - inst.planted_energy;
  if (out.relative_energy < -kEnergyTieTolerance)
    throw InvariantBreach("classify: state lies below the planted energy; the planted certificate is broken");
  out.relative_energy = std::max(out.relative_energy, 0.0);
  for (const auto& g : inst.gadgets) out.k_free += is_free(inst.problem, state, g);
  for (const auto& ch : inst.chains) {
    const auto frag = ch.fragment(state);
    if (!decode_chain(frag).valid) ++out.invalid_chains;
    else out.k_soft += is_soft(frag, ch);
  }
  out.state = state;
  return out;
}

inline ClassifiedSample classify(const Sample& sample, const PlantedInstance& inst) {
  auto out = classify(sample.state, inst);
  out.s_star = sample.s_star;
  out.delta_s = sample.delta_s;
  return out;
}

inline std::vector<ClassifiedSample> classify_all(const SampleSet& set, const PlantedInstance& inst) {
  std::vector<ClassifiedSample> out;
  out.reserve(set.samples.size());
  for (const auto& s : set.samples) out.push_back(classify(s, inst));
  return out;
}

/// Planted state with features 0..j-1 activated by hand, j = 1..feature count.
inline std::vector<ClassifiedSample> trivial_baseline(const PlantedInstance& inst) {
  std::vector<ClassifiedSample> out;
  SpinState state = inst.planted_state;
  for (std::size_t j = 0; j < inst.feature_count(); ++j) {
    state = activate_feature(inst, state, j);
    auto c = classify(state, inst);
    c.baseline = true;
    c.s_star = std::numeric_limits<double>::quiet_NaN();
    c.delta_s = std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(c));
  }
  return out;
}

struct Heatmap {
  std::vector<double> s_values;                 // ascending
  std::vector<double> cell_lo, cell_hi;         // cell edges centred on each s value
  std::size_t k_max = 0;
  std::vector<std::vector<double>> fractions;   // [column][k]
  std::vector<double> column_mean;              // mean k per column
  std::vector<std::size_t> column_reads;
};

/// Edges halfway between neighbouring grid values; the outer cells are
/// mirrored so each value sits at the centre of its cell.
inline void cell_edges(const std::vector<double>& v, std::vector<double>& lo, std::vector<double>& hi) {
  const std::size_t m = v.size();
  lo.assign(m, 0.0);
  hi.assign(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    const double left = c > 0 ? 0.5 * (v[c - 1] + v[c]) : std::numeric_limits<double>::quiet_NaN();
    const double right = c + 1 < m ? 0.5 * (v[c] + v[c + 1]) : std::numeric_limits<double>::quiet_NaN();
    if (m == 1) {
      lo[c] = v[c] - 0.005;
      hi[c] = v[c] + 0.005;
    } else {
      lo[c] = c > 0 ? left : v[c] - (right - v[c]);
      hi[c] = c + 1 < m ? right : v[c] + (v[c] - left);
    }
  }
}

/// Fractions of reads with each k, per s* column; baseline samples excluded.
inline Heatmap heatmap(std::span<const ClassifiedSample> samples, std::optional<double> only_delta_s = std::nullopt) {
  std::map<double, std::vector<std::size_t>> counts;
  std::size_t k_max = 0;
  for (const auto& s : samples) {
    if (s.baseline) continue;
    if (only_delta_s && std::abs(s.delta_s - *only_delta_s) > 1e-12) continue;
    k_max = std::max(k_max, s.k());
  }
  for (const auto& s : samples) {
    if (s.baseline) continue;
    if (only_delta_s && std::abs(s.delta_s - *only_delta_s) > 1e-12) continue;
    auto& col = counts[s.s_star];
    col.resize(k_max + 1, 0);
    ++col[s.k()];
  }
  require(!counts.empty(), "heatmap: no samples");
  Heatmap h;
  h.k_max = k_max;
  for (auto& [s, col] : counts) {
    col.resize(k_max + 1, 0);
    std::size_t total = 0;
    double weighted = 0.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
      total += col[k];
      weighted += static_cast<double>(k * col[k]);
    }
    std::vector<double> frac(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) frac[k] = static_cast<double>(col[k]) / static_cast<double>(total);
    h.s_values.push_back(s);
    h.fractions.push_back(std::move(frac));
    h.column_mean.push_back(weighted / static_cast<double>(total));
    h.column_reads.push_back(total);
  }
  cell_edges(h.s_values, h.cell_lo, h.cell_hi);
  return h;
}

struct ConditionalRecord {
  std::size_t k = 0;
  double energy = 0.0;           // best relative energy with exactly k active
  double cost_per_feature = 0.0;  // energy / k, 0 for k = 0
  double s_star = 0.0;           // grid point of the chosen state
  double delta_s = 0.0;
  bool baseline = false;
  SpinState state;
  std::vector<std::size_t> tied;  // indices of every sample attaining the best
};

struct SampleFilter {
  bool include_baseline = true;
  std::optional<double> only_delta_s;  // e.g. 0 for the no-offset arm

  bool accepts(const ClassifiedSample& s) const {
    if (s.baseline) return include_baseline;
    return !only_delta_s || std::abs(s.delta_s - *only_delta_s) <= 1e-12;
  }
};

/// Best relative energy among samples with exactly k active features. Ties
/// (within 1e-9) are resolved uniformly at random with `rng`.
inline std::optional<ConditionalRecord> conditional_best(std::span<const ClassifiedSample> samples, std::size_t k,
                                                         Rng& rng, const SampleFilter& filter = {}) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.k() == k && filter.accepts(s)) best = std::min(best, s.relative_energy);
  if (!std::isfinite(best)) return std::nullopt;
  ConditionalRecord rec;
  rec.k = k;
  rec.energy = best;
  rec.cost_per_feature = k == 0 ? 0.0 : best / static_cast<double>(k);
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].k() == k && filter.accepts(samples[i]) && samples[i].relative_energy <= best + kEnergyTieTolerance)
      rec.tied.push_back(i);
  const auto& chosen = samples[rec.tied[rng.below(rec.tied.size())]];
  rec.s_star = chosen.s_star;
  rec.delta_s = chosen.delta_s;
  rec.baseline = chosen.baseline;
  rec.state = chosen.state;
  return rec;
}

/// Largest s* among sampler reads attaining the exact-k best energy.
inline std::optional<double> optimal_s_star(std::span<const ClassifiedSample> samples, std::size_t k,
                                            const SampleFilter& filter = {false, std::nullopt}) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.k() == k && filter.accepts(s)) best = std::min(best, s.relative_energy);
  if (!std::isfinite(best)) return std::nullopt;
  std::optional<double> out;
  for (const auto& s : samples)
    if (s.k() == k && filter.accepts(s) && s.relative_energy <= best + kEnergyTieTolerance && !s.baseline)
      out = out ? std::max(*out, s.s_star) : s.s_star;
  return out;
}

/// Numerically smallest ds among sampler reads attaining the exact-k best.
inline std::optional<double> optimal_offset(std::span<const ClassifiedSample> samples, std::size_t k,
                                            const SampleFilter& filter = {false, std::nullopt}) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.k() == k && filter.accepts(s)) best = std::min(best, s.relative_energy);
  if (!std::isfinite(best)) return std::nullopt;
  std::optional<double> out;
  for (const auto& s : samples)
    if (s.k() == k && filter.accepts(s) && s.relative_energy <= best + kEnergyTieTolerance && !s.baseline)
      out = out ? std::min(*out, s.delta_s) : s.delta_s;
  return out;
}

struct SummaryRow {
  std::size_t k = 0;
  std::size_t n = 0;       // instances with a record at this k
  double mean = 0.0;
  std::optional<double> stderr_;  // absent with fewer than two instances
};

/// Per-k mean and standard error across instances of a per-record value
/// (energy or cost per feature). values[instance][k] may be absent.
inline std::vector<SummaryRow> summarize(const std::vector<std::vector<std::optional<double>>>& values) {
  std::size_t k_max = 0;
  for (const auto& row : values) k_max = std::max(k_max, row.size());
  std::vector<SummaryRow> out;
  for (std::size_t k = 0; k < k_max; ++k) {
    std::vector<double> xs;
    for (const auto& row : values)
      if (k < row.size() && row[k]) xs.push_back(*row[k]);
    if (xs.empty()) continue;
    SummaryRow r;
    r.k = k;
    r.n = xs.size();
    r.mean = mean(xs);
    if (xs.size() >= 2) r.stderr_ = standard_error(xs);
    out.push_back(r);
  }
  return out;
}

/// FNV-1a 64 of a string; used to stamp outputs with the configuration.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Comment lines placed at the top of every CSV.
inline void write_provenance(std::ostream& os, const std::vector<std::string>& lines) {
  for (const auto& l : lines) os << "# " << l << '\n';
}

inline std::string csv_real(double v) { return std::isnan(v) ? "" : format_real(v); }

inline void write_heatmap_csv(std::ostream& os, const Heatmap& h, const std::string& delta_s_label,
                              const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "s_star,k,fraction,cell_lo,cell_hi,delta_s,column_mean,reads\n";
  for (std::size_t c = 0; c < h.s_values.size(); ++c)
    for (std::size_t k = 0; k <= h.k_max; ++k)
      os << format_real(h.s_values[c]) << ',' << k << ',' << format_real(h.fractions[c][k]) << ','
         << format_real(h.cell_lo[c]) << ',' << format_real(h.cell_hi[c]) << ',' << delta_s_label << ','
         << format_real(h.column_mean[c]) << ',' << h.column_reads[c] << '\n';
}

struct ConditionalRow {
  std::string instance;
  std::string mode;  // "offsets" or "no_offsets"
  ConditionalRecord record;
  std::optional<double> opt_s_star;
  std::optional<double> opt_delta_s;
};

inline void write_conditional_csv(std::ostream& os, const std::vector<ConditionalRow>& rows,
                                  const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "instance,k,E,cost,s_star,delta_s,mode,source,optimal_s_star,optimal_delta_s\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : rows)
    os << r.instance << ',' << r.record.k << ',' << format_real(r.record.energy) << ','
       << (r.record.k == 0 ? std::string() : format_real(r.record.cost_per_feature)) << ','
       << csv_real(r.record.s_star) << ',' << csv_real(r.record.delta_s) << ',' << r.mode << ','
       << (r.record.baseline ? "trivial" : "sampler") << ',' << opt(r.opt_s_star) << ',' << opt(r.opt_delta_s)
       << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<std::pair<std::string, std::vector<SummaryRow>>>& parts,
                              const std::vector<std::string>& provenance) {
  write_provenance(os, provenance);
  os << "k,mean,stderr,n,series\n";
  for (const auto& [series, rows] : parts)
    for (const auto& r : rows)
      os << r.k << ',' << format_real(r.mean) << ',' << (r.stderr_ ? format_real(*r.stderr_) : std::string()) << ','
         << r.n << ',' << series << '\n';
}

}  // namespace fgs
