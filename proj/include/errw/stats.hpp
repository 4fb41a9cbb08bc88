#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "errw/rng.hpp"

namespace errw::stats {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Ordinary least squares y = intercept + slope * x.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> residuals;
  std::vector<std::size_t> bins_used;  ///< indices into the caller's bins
};

/// (1/2) sum |mu - nu|. Throws on empty or mismatched inputs.
double tv_distance(std::span<const double> mu, std::span<const double> nu);

/// Wilson score interval for k successes in n trials.
Interval binomial_ci(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

FitResult linear_fit(std::span<const double> x, std::span<const double> y);

/// Fits ln(y) against x over the bins with counts[i] >= min_count (y > 0
/// there). Needs at least two such bins.
FitResult loglinear_fit(std::span<const double> x, std::span<const double> y,
                        std::span<const std::uint64_t> counts, std::uint64_t min_count);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> v);
double standard_error(std::span<const double> v);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);

/// Standard normal quantile.
double normal_quantile(double p);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);
/// Asymptotic two-sample critical value sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(nm)).
double ks_critical(std::size_t n, std::size_t m, double alpha);

/// B bootstrap replicates of `statistic(indices)`, where each index vector is
/// a resample with replacement of 0..n-1. Serial and deterministic in `seed`.
template <class Statistic>
std::vector<double> bootstrap(std::size_t n, std::size_t replicates, std::uint64_t seed,
                              Statistic&& statistic) {
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(replicates);
  std::vector<std::size_t> idx(n);
  for (std::size_t b = 0; b < replicates; ++b) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    out.push_back(statistic(std::span<const std::size_t>(idx)));
  }
  return out;
}

/// Percentile interval of bootstrap replicates.
Interval percentile_interval(std::vector<double> replicates, double confidence = 0.95);

}  // namespace errw::stats
