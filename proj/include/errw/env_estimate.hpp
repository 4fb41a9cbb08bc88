#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "errw/environment.hpp"
#include "errw/exact.hpp"
#include "errw/stats.hpp"

namespace errw {

/// k_t(e) / t as a simplex environment. Edges never crossed keep weight 0.
Environment occupation_fractions(std::shared_ptr<const LadderGraph> ladder, const EdgeCounts& counts);

/// x / x_{e0*}. Throws if the reference edge has weight 0.
Environment to_reference(const Environment& x);
/// x / sum x.
Environment to_simplex(const Environment& x);

struct SampleMeta {
  std::string a_text;  ///< a as configured, e.g. "3/4"
  double a = 0.0;
  std::uint64_t horizon = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t replicas = 0;  ///< requested, including discarded ones
};

/// Environments estimated from independent reinforced runs, one per kept
/// replica. Parallel vectors are indexed by kept replica.
struct EnvironmentSample {
  std::shared_ptr<const LadderGraph> ladder;
  SampleMeta meta;
  std::vector<Environment> environments;  ///< simplex-normalized
  std::vector<std::uint64_t> replica_index;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> coverage;  ///< never-crossed edges per replica
  std::vector<VertexId> final_vertex;
  std::vector<double> weights;        ///< importance weights, mean 1
  std::vector<std::uint64_t> discarded;  ///< replica indices without a crossing of e0*

  std::size_t size() const { return environments.size(); }
  /// Kept replicas whose environment is strictly positive.
  std::vector<std::size_t> fully_covered() const;
};

/// R runs of T steps from the origin; replicas that never crossed the
/// reference edge are dropped and listed. Throws if all are dropped.
EnvironmentSample sample_environments(std::shared_ptr<const LadderGraph> ladder,
                                      const std::string& a_text, std::uint64_t horizon,
                                      std::uint64_t replicas, std::uint64_t master_seed,
                                      int threads = 0);

struct LevelSummary {
  int level = 0;
  std::size_t values = 0;    ///< (environment, edge) pairs at this level
  std::size_t positive = 0;  ///< of which x~_e > 0
  double q10 = 0, q25 = 0, median = 0, q75 = 0, q90 = 0;
  std::uint64_t exceed = 0;  ///< x~_e > exp(-c4 |e| / 2)
  double exceed_freq = 0;
  stats::Interval exceed_ci;
};

struct DecayProfile {
  std::vector<LevelSummary> levels;
  stats::FitResult fit;  ///< ln median against level
  std::vector<int> fit_levels;
  double c4 = 0.0;       ///< -slope
  stats::Interval c4_ci;
  std::size_t bootstrap_replicates = 0;
  std::size_t bootstrap_failures = 0;
  std::uint64_t min_count = 0;
};

/// Per-level quantiles of reference-normalized weights, the decay rate of
/// the median, a bootstrap interval over replicas, and exceedance
/// frequencies at the fitted rate.
DecayProfile decay_profile(const EnvironmentSample& sample, std::uint64_t min_count = 30,
                           std::size_t bootstrap_replicates = 400, std::uint64_t seed = 1);

struct TailCurve {
  std::vector<double> thresholds;
  std::vector<std::uint64_t> hits;
  std::uint64_t trials = 0;
  std::vector<double> survival;
  std::vector<stats::Interval> ci;
  std::string ci_method = "wilson-95";
};

struct LogRatioTail {
  EdgeId e = 0;
  EdgeId f = 0;
  std::uint64_t contributing = 0;
  std::uint64_t excluded = 0;
  TailCurve curve;
  stats::FitResult fit;  ///< ln survival against M
  bool fitted = false;
};

/// Survival of |ln(x_e / x_f)| at each threshold over replicas where both
/// edges were crossed.
LogRatioTail log_ratio_tail(const EnvironmentSample& sample, EdgeId e, EdgeId f,
                            const std::vector<double>& thresholds, std::uint64_t min_count = 30);

struct Reweighting {
  PathRecord path;
  Rational exact;          ///< P_0(path)
  double raw_mean = 0.0;   ///< mean of Q_{0,x}(path) / P_0(path)
  double raw_se = 0.0;
  std::size_t zero_weight = 0;
  EnvironmentSample weighted;
};

/// Weights Q_{0,x}(path) / P_0(path), then rescaled to mean 1.
Reweighting conditional_reweight(const EnvironmentSample& sample, const PathRecord& path,
                                 const Rational& a);

/// Weighted mean of Q_{path.front(),x}(path) with its delta-method standard
/// error for self-normalized weights.
struct WeightedEstimate {
  double mean = 0.0;
  double se = 0.0;
};
WeightedEstimate weighted_path_probability(const EnvironmentSample& sample, const PathRecord& path);

/// Mean l1 distance between the environments of the same replicas at
/// consecutive horizons (one continued run per replica).
std::vector<double> occupation_stability(std::shared_ptr<const LadderGraph> ladder, double a,
                                         const std::vector<std::uint64_t>& horizons,
                                         std::uint64_t replicas, std::uint64_t master_seed,
                                         int threads = 0);

/// meta.json + environments.jsonl in `dir` (created if needed).
void save_sample(const EnvironmentSample& sample, const std::string& dir);
EnvironmentSample load_sample(const std::string& dir);

}  // namespace errw
