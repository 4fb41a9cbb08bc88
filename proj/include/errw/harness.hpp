#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "errw/env_estimate.hpp"
#include "errw/gibbs.hpp"
#include "errw/replicas.hpp"
#include "errw/stats.hpp"

namespace errw {

struct Verdict {
  std::string criterion;  ///< acceptance id, "C1".."C12"
  std::string check;
  bool pass = false;
  std::string detail;
};

/// Everything an experiment produces. `files` maps artifact names to their
/// exact contents so that callers can write them and compare reruns.
struct ExperimentReport {
  std::string experiment;
  nlohmann::json config;
  nlohmann::json statistics;
  std::vector<Verdict> verdicts;
  std::map<std::string, std::string> files;

  bool passed() const;
  nlohmann::json to_json() const;
  void add(std::string criterion, std::string check, bool pass, std::string detail = {});
};

// ---------------------------------------------------------------------------
// Localization: tails of |X_t| and the running maximum.

struct LocalizationConfig {
  std::shared_ptr<const LadderGraph> ladder;
  std::string a_text = "2";
  std::vector<std::uint64_t> times;
  std::uint64_t replicas = 10000;
  std::uint64_t master_seed = 1;
  int threads = 0;
  std::uint64_t min_count = 30;
  double r2_min = 0.9;
  double range_ratio_max = 3.0;
};

/// One batch of replicas run to the largest time with checkpoints at every
/// configured time; tails and range both read from it.
std::vector<ReplicaSummary> localization_runs(const LocalizationConfig& cfg);

/// Survival of the level at each time: bins n = 0..max.
TailCurve level_survival(const LadderGraph& ladder, const std::vector<ReplicaSummary>& runs,
                         std::size_t checkpoint);

ExperimentReport tail_experiment(const LocalizationConfig& cfg,
                                 const std::vector<ReplicaSummary>& runs);
ExperimentReport tail_experiment(const LocalizationConfig& cfg);

ExperimentReport range_experiment(const LocalizationConfig& cfg,
                                  const std::vector<ReplicaSummary>& runs);
ExperimentReport range_experiment(const LocalizationConfig& cfg);

// ---------------------------------------------------------------------------
// Annealed parity equilibrium.

struct EquilibriumConfig {
  std::shared_ptr<const LadderGraph> ladder;
  std::string a_text = "2";
  std::vector<std::uint64_t> half_times;  ///< t: laws of X_{2t} and X_{2t+1}
  std::uint64_t replicas = 10000;
  std::uint64_t master_seed = 1;
  int threads = 0;
  std::size_t bootstrap_replicates = 200;
  double floor_factor = 2.0;
};

ExperimentReport equilibrium_experiment(const EquilibriumConfig& cfg);

// ---------------------------------------------------------------------------
// Environment-side checks.

struct MixtureConfig {
  std::string a_text = "1";
  int max_length = 3;
  double k_min = 4.0;  ///< band = k * SE + bias, k = max(k_min, Bonferroni z)
  double alpha = 0.05;
  std::size_t bootstrap_replicates = 2000;
  std::uint64_t bootstrap_seed = 7;
};

/// Exact P_0(pi) against the sample mean of Q_{0,x}(pi) for every path of
/// length 1..max_length, plus the even-time law of the final positions
/// against the sample mean of x_even.
ExperimentReport mixture_check(const EnvironmentSample& sample, const MixtureConfig& cfg);

struct ConditionalConfig {
  std::string a_text = "1";
  int rho_length = 2;
  double k = 4.0;
};

/// Reweights `sample` by the first step along the reference edge and
/// predicts P(rho | pi) for every continuation rho.
ExperimentReport conditional_check(const EnvironmentSample& sample, const ConditionalConfig& cfg);

struct DecayConfig {
  std::uint64_t min_count = 30;
  std::size_t bootstrap_replicates = 400;
  std::uint64_t bootstrap_seed = 11;
  int exceed_from = 3;
  int exceed_to = 15;
};

ExperimentReport decay_experiment(const EnvironmentSample& sample, const DecayConfig& cfg);

struct LogRatioConfig {
  std::vector<double> thresholds;  ///< default 0, 0.25, ..., 6
  std::uint64_t min_count = 30;
  double r2_min = 0.85;
  int level = 0;  ///< compare the first rung at `level` with the one at level + 1
};

ExperimentReport logratio_experiment(const EnvironmentSample& sample, const LogRatioConfig& cfg);

struct FiniteVolumeConfig {
  int max_level = 2;
  double alpha = 0.05;
};

/// Per-edge two-sample KS of x~_e between two depths (edges at levels
/// <= max_level, the reference edge excluded). `baseline`, if given, is a
/// second sample at the depth of `a`, reported but not gated.
ExperimentReport finite_volume_convergence(const EnvironmentSample& a, const EnvironmentSample& b,
                                           const EnvironmentSample* baseline,
                                           const FiniteVolumeConfig& cfg);

struct AnnealedConfig {
  std::shared_ptr<const LadderGraph> ladder;
  std::string a_text = "1";
  std::uint64_t half_time = 50000;  ///< s: cylinders start at 2s
  std::uint64_t replicas = 2000;
  std::uint64_t master_seed = 1;
  int threads = 0;
  double k = 4.0;
};

/// Frequencies of (X_{2s}, X_{2s+1}, X_{2s+2}) against the sample mean of
/// Q_{x_even,x} for the same cylinders, environments from the same runs.
ExperimentReport annealed_check(const AnnealedConfig& cfg);

// ---------------------------------------------------------------------------
// Exact checks.

struct ExchangeabilityConfig {
  std::shared_ptr<const LadderGraph> ladder;
  std::vector<std::string> a_values{"1"};
  int max_length = 8;
  std::size_t max_paths = 5'000'000;
};

/// Every length 1..max_length, every a.
ExperimentReport exchangeability_experiment(const ExchangeabilityConfig& cfg);

struct QuenchedConfig {
  std::shared_ptr<const LadderGraph> ladder;
  std::size_t environments = 100;
  std::uint64_t master_seed = 1;
  int reversibility_steps = 6;
  int bound_steps = 20;
  double tolerance = 1e-12;
  double eps = 1e-8;
  std::size_t convergence_environments = 10;  ///< first n environments
  /// Estimated environments to use instead of random ones (optional).
  const EnvironmentSample* sample = nullptr;
};

/// Detailed balance, reversibility and the x_v / x_0 bound on every
/// environment; exact parity convergence on the first few.
ExperimentReport quenched_experiment(const QuenchedConfig& cfg);

struct GibbsConfig {
  std::vector<gibbs::GibbsSpec> specs;  ///< algebra checks; default toy_specs()
  gibbs::GibbsSpec limit_spec;          ///< thermodynamic limit; default_toy_spec()
  int max_n = 4;
  std::vector<int> limit_depths{4, 6, 8, 10, 12, 14, 16, 18, 20};
  double tolerance = 1e-12;
  double brute_tolerance = 1e-10;
  double rate_tolerance = 0.10;
};

/// Eigen-residuals, finite volume against brute force, DLR, volume
/// consistency and the decay rate of the finite-volume gap.
/// `oracle_ratio`, if positive, replaces the deflated power estimate of
/// |lambda_2| / lambda as the reference rate.
ExperimentReport gibbs_experiment(const GibbsConfig& cfg, double oracle_ratio = 0.0);

}  // namespace errw
