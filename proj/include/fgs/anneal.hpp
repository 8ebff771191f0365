#pragma once

// Reverse annealing emulated with path-integral Monte Carlo.
//
// The transverse-field Hamiltonian at parameter s with per-qubit offsets,
//   H(s) = -sum_i A(s_i) X_i + (problem terms scaled by B),
// is mapped to P classical Trotter slices. The Gibbs weight of a slice
// configuration is
//   exp(-(beta/P) sum_k E_B(z^k) + sum_i K_i sum_k z_i^k z_i^{k+1}),
//   K_i = -1/2 ln tanh(beta A(s_i) / P),
// with periodic slice index. E_B scales each field h_i by B(s_i); a coupler
// uses B(s_i) of its offset endpoint (the mean when both are offset, B(s)
// when neither is).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fgs/errors.hpp"
#include "fgs/greedy.hpp"
#include "fgs/ising.hpp"
#include "fgs/rng.hpp"

namespace fgs {

/// A(s), B(s) from a table with linear interpolation, or the default
/// A = 1 - s, B = s.
class Schedule {
 public:
  Schedule() : s_{0.0, 1.0}, a_{1.0, 0.0}, b_{0.0, 1.0} {}

  Schedule(std::vector<double> s, std::vector<double> a, std::vector<double> b)
      : s_(std::move(s)), a_(std::move(a)), b_(std::move(b)) {
    require(s_.size() >= 2 && a_.size() == s_.size() && b_.size() == s_.size(),
            "schedule table needs at least two rows of (s, A, B)");
    require(s_.front() == 0.0 && s_.back() == 1.0, "schedule table must span s = 0 to s = 1");
    for (std::size_t k = 1; k < s_.size(); ++k) {
      require(s_[k] > s_[k - 1], "schedule s values must be strictly increasing");
      require(a_[k] <= a_[k - 1], "schedule A(s) must be nonincreasing");
      require(b_[k] >= b_[k - 1], "schedule B(s) must be nondecreasing");
    }
    for (std::size_t k = 0; k < s_.size(); ++k) require(a_[k] >= 0.0 && b_[k] >= 0.0, "schedule values must be >= 0");
  }

  double A(double s) const { return interpolate(a_, s); }
  double B(double s) const { return interpolate(b_, s); }

 private:
  double interpolate(const std::vector<double>& y, double s) const {
    s = std::clamp(s, 0.0, 1.0);
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    if (it == s_.end()) return y.back();
    const std::size_t k = static_cast<std::size_t>(it - s_.begin());
    const double t = (s - s_[k - 1]) / (s_[k] - s_[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
  }

  std::vector<double> s_, a_, b_;
};

/// Whitespace-separated rows "s A B"; '#' starts a comment.
inline Schedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schedule table '" + path + "'");
  std::vector<double> s, a, b;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x)) continue;
    if (!(ls >> y >> z)) throw IoError(path + " line " + std::to_string(lineno) + ": expected 's A B'");
    s.push_back(x);
    a.push_back(y);
    b.push_back(z);
  }
  return Schedule(std::move(s), std::move(a), std::move(b));
}

struct Offset {
  Qubit qubit;
  double delta_s;
};

struct AnnealParams {
  double s_star = 0.45;
  std::size_t ramp_sweeps = 250;
  std::size_t hold_sweeps = 1000;
  std::vector<Offset> offsets;
  std::size_t slices = 32;
  double beta = 8.0;
  std::uint64_t seed = 0;
  std::size_t reads = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool autoscale = true;    // divide the problem into |J| <= 1, |h| <= 2 before sampling

  void validate() const {
    require(s_star >= 0.0 && s_star <= 1.0, "s_star must lie in [0, 1]");
    require(slices >= 2, "PIMC needs at least 2 slices");
    require(beta > 0.0 && std::isfinite(beta), "beta must be positive");
    require(reads >= 1, "reads must be at least 1");
    for (const auto& o : offsets) require(std::abs(o.delta_s) <= 0.2 + 1e-12, "anneal offsets must satisfy |ds| <= 0.2");
  }
};

/// Smallest divisor bringing the problem into |J| <= 1 and |h| <= 2, never
/// below 1.
inline double autoscale_factor(const IsingProblem& p) {
  double f = 1.0;
  for (const auto& c : p.couplers()) f = std::max(f, std::abs(c.value));
  for (double h : p.fields()) f = std::max(f, std::abs(h) / 2.0);
  return f;
}

inline IsingProblem scale_problem(const IsingProblem& p, double divisor) {
  require(divisor > 0.0, "scale_problem: divisor must be positive");
  IsingBuilder b(p.size());
  for (const auto& c : p.couplers()) b.add_coupling(c.i, c.j, c.value / divisor);
  for (Qubit i = 0; i < p.size(); ++i) b.add_field(i, p.field(i) / divisor);
  return b.build();
}

/// The problem as the sampler sees it.
inline IsingProblem sampled_problem(const IsingProblem& p, const AnnealParams& params) {
  return params.autoscale ? scale_problem(p, autoscale_factor(p)) : p;
}

inline double effective_s(double s, double delta_s) { return std::clamp(s + delta_s, 0.0, 1.0); }

/// Per-qubit s_i for global s; qubits without an offset keep s.
inline std::vector<double> effective_s(double s, std::size_t n, std::span<const Offset> offsets) {
  std::vector<double> out(n, s);
  for (const auto& o : offsets) {
    require(o.qubit < n, "offset qubit out of range");
    out[o.qubit] = effective_s(s, o.delta_s);
  }
  return out;
}

/// Same offset on every qubit of `qubits`.
inline std::vector<Offset> uniform_offsets(std::span<const Qubit> qubits, double delta_s) {
  std::vector<Offset> out;
  if (delta_s == 0.0) return out;
  for (Qubit q : qubits) out.push_back({q, delta_s});
  return out;
}

/// Global s for each sweep: linear ramp 1 -> s*, hold, linear ramp s* -> 1.
inline std::vector<double> reverse_trace(double s_star, std::size_t ramp, std::size_t hold) {
  std::vector<double> s;
  s.reserve(2 * ramp + hold);
  for (std::size_t t = 0; t < ramp; ++t) s.push_back(1.0 + (s_star - 1.0) * static_cast<double>(t + 1) / ramp);
  for (std::size_t t = 0; t < hold; ++t) s.push_back(s_star);
  for (std::size_t t = 0; t < ramp; ++t) s.push_back(s_star + (1.0 - s_star) * static_cast<double>(t + 1) / ramp);
  return s;
}

/// Hold at s_start, then ramp linearly to 1.
inline std::vector<double> forward_trace(double s_start, std::size_t ramp, std::size_t hold) {
  std::vector<double> s(hold, s_start);
  for (std::size_t t = 0; t < ramp; ++t) s.push_back(s_start + (1.0 - s_start) * static_cast<double>(t + 1) / ramp);
  return s;
}

/// Below this value of beta A / P the slices are locked together.
inline constexpr double kLockedSliceThreshold = 1e-12;

/// Slice coupling K = -1/2 ln tanh(beta A / P); nullopt means infinite.
inline std::optional<double> slice_coupling(double a, double beta, std::size_t slices) {
  const double x = beta * a / static_cast<double>(slices);
  if (x < kLockedSliceThreshold) return std::nullopt;
  return -0.5 * std::log(std::tanh(x));
}

/// Trotter-slice state of one read and the single-spin Metropolis kernel.
class PimcChain {
 public:
  PimcChain(const IsingProblem& problem, std::size_t slices, double beta, const Schedule& schedule,
            std::span<const Offset> offsets)
      : problem_(problem), schedule_(schedule), n_(problem.size()), p_(slices), beta_(beta),
        offset_(problem.size(), std::numeric_limits<double>::quiet_NaN()), spins_(problem.size() * slices, 1),
        weight_start_(problem.size() + 1, 0), field_(problem.size()), coupling_(problem.size()),
        locked_(problem.size()) {
    require(slices >= 2, "PIMC needs at least 2 slices");
    require(beta > 0.0, "beta must be positive");
    for (const auto& o : offsets) {
      require(o.qubit < n_, "offset qubit out of range");
      offset_[o.qubit] = o.delta_s;
    }
    for (Qubit i = 0; i < n_; ++i) {
      weight_start_[i + 1] = weight_start_[i] + problem.neighbors(i).size();
      for (const auto& nb : problem.neighbors(i)) nbr_.push_back(nb.q);
    }
    weight_.resize(nbr_.size());
    set_s(1.0);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t slices() const noexcept { return p_; }

  void set_state(const SpinState& s) {
    require(s.size() == n_, "PIMC initial state has the wrong length");
    for (std::size_t k = 0; k < p_; ++k)
      for (std::size_t i = 0; i < n_; ++i) spins_[k * n_ + i] = s[i];
  }

  void randomize(Rng& rng) {
    for (auto& z : spins_) z = rng.coin() ? Spin{1} : Spin{-1};
  }

  SpinState slice(std::size_t k) const {
    SpinState out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = spins_[k * n_ + i];
    return out;
  }

  Spin spin(std::size_t k, Qubit i) const { return spins_[k * n_ + i]; }

  /// Recomputes all per-qubit envelopes for global parameter s.
  void set_s(double s) {
    const double b_global = schedule_.B(s);
    std::vector<double> b_local(n_);
    std::vector<bool> has_offset(n_);
    for (Qubit i = 0; i < n_; ++i) {
      has_offset[i] = !std::isnan(offset_[i]);
      const double si = has_offset[i] ? effective_s(s, offset_[i]) : s;
      b_local[i] = schedule_.B(si);
      field_[i] = problem_.field(i) * b_local[i];
      const auto k = slice_coupling(schedule_.A(si), beta_, p_);
      locked_[i] = !k.has_value();
      coupling_[i] = k.value_or(0.0);
    }
    for (Qubit i = 0; i < n_; ++i) {
      const auto nbs = problem_.neighbors(i);
      for (std::size_t t = 0; t < nbs.size(); ++t) {
        const Qubit j = nbs[t].q;
        double b = b_global;
        if (has_offset[i] && has_offset[j]) b = 0.5 * (b_local[i] + b_local[j]);
        else if (has_offset[i]) b = b_local[i];
        else if (has_offset[j]) b = b_local[j];
        weight_[weight_start_[i] + t] = nbs[t].coupling * b;
      }
    }
  }

  /// One sweep: for each slice, for each qubit, one Metropolis proposal.
  void sweep(Rng& rng) {
    const double scale = beta_ / static_cast<double>(p_);
    for (std::size_t k = 0; k < p_; ++k) {
      Spin* z = &spins_[k * n_];
      const Spin* up = &spins_[((k + 1) % p_) * n_];
      const Spin* down = &spins_[((k + p_ - 1) % p_) * n_];
      for (Qubit i = 0; i < n_; ++i) {
        double local = field_[i];
        for (std::size_t t = weight_start_[i]; t < weight_start_[i + 1]; ++t) local += weight_[t] * z[nbr_[t]];
        const double d_classical = -2.0 * z[i] * local;  // B-scaled energy change of this slice
        const int neighbours = z[i] * (up[i] + down[i]);  // +2 aligned with both, 0 mixed, -2 against both
        bool accept;
        if (locked_[i]) {
          if (neighbours > 0) accept = false;
          else if (neighbours < 0) accept = true;
          else accept = metropolis(-scale * d_classical, rng);
        } else {
          accept = metropolis(-scale * d_classical - 2.0 * coupling_[i] * neighbours, rng);
        }
        if (accept) z[i] = static_cast<Spin>(-z[i]);
      }
    }
  }

 private:
  static bool metropolis(double log_ratio, Rng& rng) {
    if (log_ratio >= 0.0) return true;
    return rng.uniform() < std::exp(log_ratio);
  }

  const IsingProblem& problem_;
  const Schedule& schedule_;
  std::size_t n_, p_;
  double beta_;
  std::vector<double> offset_;  // NaN where no offset applies
  std::vector<Spin> spins_;     // slice-major
  std::vector<std::size_t> weight_start_;
  std::vector<Qubit> nbr_;
  std::vector<double> weight_;
  std::vector<double> field_;
  std::vector<double> coupling_;
  std::vector<char> locked_;
};

struct AnnealRead {
  SpinState raw;    // slice 0 at the end of the protocol
  SpinState state;  // after deterministic greedy descent on the classical problem
  double energy;    // of `state`, recomputed
};

/// Runs one read of an arbitrary s trace on `sampled` (the possibly rescaled
/// problem); the reported energy is evaluated on `problem`. With `init` the
/// slices start as copies of it, otherwise independently at random.
inline AnnealRead run_trace(const IsingProblem& problem, const IsingProblem& sampled,
                            const std::optional<SpinState>& init,
                            std::span<const double> trace, std::span<const Offset> offsets, std::size_t slices,
                            double beta, const Schedule& schedule, std::uint64_t seed) {
  Rng rng(seed);
  PimcChain chain(sampled, slices, beta, schedule, offsets);
  if (init) chain.set_state(*init);
  else chain.randomize(rng);
  for (double s : trace) {
    chain.set_s(s);
    chain.sweep(rng);
  }
  AnnealRead out{chain.slice(0), {}, 0.0};
  out.state = greedy_descent(IsingObjective{sampled}, out.raw);
  out.energy = energy(problem, out.state);
  return out;
}

/// Calls body(i) for i in [0, count) from a small pool of threads. Each index
/// is handled exactly once; callers write results by index, so the outcome
/// does not depend on scheduling.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

struct Sample {
  double s_star = 1.0;
  double delta_s = 0.0;
  std::size_t read = 0;
  std::uint64_t seed = 0;
  SpinState raw;
  SpinState state;
  double energy = 0.0;
};

struct SampleSet {
  std::string instance_id;
  std::vector<double> s_star_grid;
  std::vector<double> offset_grid;
  AnnealParams params;
  std::vector<Sample> samples;
};

/// `params.reads` reverse-anneal reads from `init`, each with its own seed
/// derive_seed(params.seed, read).
inline std::vector<Sample> reverse_anneal(const IsingProblem& problem, const SpinState& init, const AnnealParams& params,
                                          const Schedule& schedule = {}) {
  params.validate();
  require(init.size() == problem.size(), "reverse_anneal: initial state has the wrong length");
  const auto trace = reverse_trace(params.s_star, params.ramp_sweeps, params.hold_sweeps);
  const auto sampled = sampled_problem(problem, params);
  std::vector<Sample> out(params.reads);
  parallel_for(params.reads, params.threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(params.seed, r);
    auto read = run_trace(problem, sampled, init, trace, params.offsets, params.slices, params.beta, schedule, seed);
    double ds = params.offsets.empty() ? 0.0 : params.offsets.front().delta_s;
    out[r] = {params.s_star, ds, r, seed, std::move(read.raw), std::move(read.state), read.energy};
  });
  return out;
}

/// Reads that start from independent random slices, hold at s_start and ramp
/// to 1. Reference for what "global search" looks like.
inline std::vector<Sample> forward_anneal(const IsingProblem& problem, double s_start, const AnnealParams& params,
                                          const Schedule& schedule = {}) {
  params.validate();
  const auto trace = forward_trace(s_start, params.ramp_sweeps, params.hold_sweeps);
  const auto sampled = sampled_problem(problem, params);
  std::vector<Sample> out(params.reads);
  parallel_for(params.reads, params.threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(params.seed, r);
    auto read = run_trace(problem, sampled, std::nullopt, trace, params.offsets, params.slices, params.beta, schedule, seed);
    out[r] = {s_start, 0.0, r, seed, std::move(read.raw), std::move(read.state), read.energy};
  });
  return out;
}

/// Reverse anneal at every (s*, ds) grid point, ds applied to every qubit in
/// `offset_qubits`. Read r at grid point (a, b) uses seed
/// derive_seed(base.seed, a, b, r).
inline SampleSet sweep_grid(const IsingProblem& problem, std::span<const Qubit> offset_qubits, const SpinState& init,
                            std::span<const double> s_star_grid, std::span<const double> offset_grid,
                            const AnnealParams& base, const Schedule& schedule = {}) {
  require(!s_star_grid.empty() && !offset_grid.empty(), "sweep_grid: grids must be nonempty");
  require(init.size() == problem.size(), "sweep_grid: initial state has the wrong length");
  SampleSet set;
  set.s_star_grid.assign(s_star_grid.begin(), s_star_grid.end());
  set.offset_grid.assign(offset_grid.begin(), offset_grid.end());
  set.params = base;
  const std::size_t points = s_star_grid.size() * offset_grid.size();
  set.samples.resize(points * base.reads);
  std::vector<std::vector<double>> traces;
  for (double s : s_star_grid) {
    require(s >= 0.0 && s <= 1.0, "s* grid values must lie in [0, 1]");
    traces.push_back(reverse_trace(s, base.ramp_sweeps, base.hold_sweeps));
  }
  std::vector<std::vector<Offset>> offsets;
  for (double ds : offset_grid) {
    require(std::abs(ds) <= 0.2 + 1e-12, "offset grid values must satisfy |ds| <= 0.2");
    offsets.push_back(uniform_offsets(offset_qubits, ds));
  }
  base.validate();
  const auto sampled = sampled_problem(problem, base);
  parallel_for(set.samples.size(), base.threads, [&](std::size_t idx) {
    const std::size_t r = idx % base.reads;
    const std::size_t point = idx / base.reads;
    const std::size_t a = point / offset_grid.size(), b = point % offset_grid.size();
    const std::uint64_t seed = derive_seed(base.seed, a, b, r);
    auto read = run_trace(problem, sampled, init, traces[a], offsets[b], base.slices, base.beta, schedule, seed);
    set.samples[idx] = {s_star_grid[a], offset_grid[b], r, seed, std::move(read.raw), std::move(read.state), read.energy};
  });
  return set;
}

/// 19 values, dense between 0.39 and 0.48.
inline std::vector<double> default_s_star_grid() {
  std::vector<double> g{0.20, 0.30, 0.34, 0.36, 0.38};
  for (int k = 0; k < 10; ++k) g.push_back((39 + k) / 100.0);
  for (double v : {0.50, 0.60, 0.80, 1.00}) g.push_back(v);
  return g;
}

/// 11 evenly spaced values from -0.2 to 0.2 inclusive.
inline std::vector<double> default_offset_grid() {
  std::vector<double> g;
  for (int k = -5; k <= 5; ++k) g.push_back(k / 25.0);
  return g;
}

}  // namespace fgs
