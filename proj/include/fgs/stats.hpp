#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fgs/errors.hpp"
#include "fgs/rng.hpp"

namespace fgs {

inline double mean(std::span<const double> x) {
  require(!x.empty(), "mean of an empty set");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample standard deviation with the N - 1 denominator.
inline double sample_stddev(std::span<const double> x) {
  require(x.size() >= 2, "standard deviation needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double standard_error(std::span<const double> x) {
  return sample_stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

/// P(Z <= z) for a standard normal Z.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Confidence that the mean of `diff` is positive, from the normal
/// approximation to its sampling distribution.
inline double confidence_positive(std::span<const double> diff) {
  const double se = standard_error(diff);
  const double m = mean(diff);
  if (se == 0.0) return m > 0.0 ? 1.0 : 0.0;
  return normal_cdf(m / se);
}

/// Two-level bootstrap for mean(a) - mean(b) where both arms were measured on
/// the same groups (instances): groups are resampled jointly, then the values
/// inside each drawn group are resampled separately per arm. Returns the
/// fraction of replicates with a positive difference.
inline double bootstrap_confidence_positive(const std::vector<std::vector<double>>& a,
                                            const std::vector<std::vector<double>>& b, std::size_t replicates,
                                            Rng& rng) {
  require(a.size() == b.size() && !a.empty(), "bootstrap: arms must cover the same nonempty set of groups");
  for (std::size_t g = 0; g < a.size(); ++g) require(!a[g].empty() && !b[g].empty(), "bootstrap: empty group");
  auto resampled_mean = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) s += v[rng.below(v.size())];
    return s / static_cast<double>(v.size());
  };
  std::size_t positive = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    double diff = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
      const std::size_t g = rng.below(a.size());
      diff += resampled_mean(a[g]) - resampled_mean(b[g]);
    }
    if (diff > 0.0) ++positive;
  }
  return static_cast<double>(positive) / static_cast<double>(replicates);
}

}  // namespace fgs
