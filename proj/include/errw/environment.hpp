#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errw/ladder.hpp"
#include "errw/rng.hpp"
#include "errw/walk.hpp"

namespace errw {

enum class Normalization {
  Simplex,    ///< sum_e x_e = 1
  Reference,  ///< x_{e0*} = 1
};

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

/// Edge weights x_e >= 0 on a bounded ladder.
///
/// Zero weights are representable so that occupation fractions of edges that
/// were never crossed survive intact. Operations that need Q_{v,x} to be an
/// irreducible chain (evolution, stationary laws) reject them.
class Environment {
 public:
  static constexpr double kSimplexTolerance = 1e-12;

  Environment(std::shared_ptr<const LadderGraph> ladder, std::vector<double> weights,
              Normalization normalization);

  const LadderGraph& ladder() const { return *ladder_; }
  const std::shared_ptr<const LadderGraph>& ladder_ptr() const { return ladder_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(EdgeId e) const { return weights_.at(e); }
  Normalization normalization() const { return normalization_; }

  std::size_t zero_edges() const;
  bool strictly_positive() const { return zero_edges() == 0; }

 private:
  std::shared_ptr<const LadderGraph> ladder_;
  std::vector<double> weights_;
  Normalization normalization_;
};

/// Dirichlet(1, ..., 1) weights: independent standard exponentials divided
/// by their sum. Strictly positive.
Environment random_environment(std::shared_ptr<const LadderGraph> ladder, Rng& rng);

/// A probability function on the vertices of a bounded ladder, by vertex id.
struct VertexDistribution {
  std::vector<double> probs;

  double total() const;
  /// Throws unless entries are nonnegative and sum to 1 within `tolerance`.
  void validate(double tolerance = 1e-12) const;
};

VertexDistribution point_mass(const LadderGraph& ladder, VertexId v);

/// x_u = sum of the weights of the edges at u.
double vertex_weight(const Environment& x, VertexId u);
std::vector<double> vertex_weights(const Environment& x);

/// Q_{.,x}(X_{t+1} = to | X_t = from) = x_{from,to} / x_from, 0 if not adjacent.
double transition_prob(const Environment& x, VertexId from, VertexId to);

/// Q_{v,x}((X_0..X_k) = path) with v = path.front(); exact product of
/// transition probabilities in floating point.
double path_probability(const Environment& x, const PathRecord& path);

/// Walk with fixed weights. Sampling mirrors the reinforced walk: cumulative
/// weights over the canonical incident order and one uniform per step.
class QuenchedWalk {
 public:
  QuenchedWalk(const Environment& x, VertexId start);
  VertexId position() const { return position_; }
  std::uint64_t time() const { return time_; }
  VertexId step(Rng& rng);

 private:
  const Environment* x_;
  VertexId position_;
  std::uint64_t time_ = 0;
};

struct QuenchedRun {
  std::optional<PathRecord> path;
  VertexId final_vertex = 0;
  int max_level = 0;
  EdgeCounts counts;
};

QuenchedRun simulate_rwre(const Environment& x, VertexId start, std::uint64_t steps, Rng& rng,
                          bool keep_path = false);

/// mu pushed `steps` times through the transition kernel of x.
VertexDistribution evolve_distribution(const Environment& x, const VertexDistribution& mu,
                                       std::uint64_t steps);

/// (x_v / 2)_v for a simplex environment.
VertexDistribution stationary_distribution(const Environment& x);

/// x_even(v) = 1_{even}(v) x_v, respectively x_odd, for a simplex environment.
VertexDistribution parity_equilibrium(const Environment& x, Parity parity);

/// Q_{mu,x} = sum_v mu(v) Q_{v,x}.
class ChainLaw {
 public:
  ChainLaw(VertexDistribution initial, const Environment& x);

  const VertexDistribution& initial() const { return initial_; }
  /// Law of X_t.
  VertexDistribution marginal(std::uint64_t t) const { return evolve_distribution(*x_, initial_, t); }
  /// Q_{mu,x}((X_0..X_k) = path).
  double probability(const PathRecord& path) const;
  /// Draws X_0 from mu, then runs the chain.
  PathRecord sample(std::uint64_t steps, Rng& rng) const;

 private:
  VertexDistribution initial_;
  const Environment* x_;
};

ChainLaw mixture_start(const VertexDistribution& mu, const Environment& x);

struct QuenchedConvergence {
  std::uint64_t t_star_even = 0;  ///< smallest t with TV(law X_{2t}, x_even) < eps
  std::uint64_t t_star_odd = 0;   ///< smallest t with TV(law X_{2t+1}, x_odd) < eps
  std::vector<double> tv_even;    ///< index t -> TV(law X_{2t}, x_even)
  std::vector<double> tv_odd;     ///< index t -> TV(law X_{2t+1}, x_odd)
  bool parity_support_exact = true;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double final_tv)
      : std::runtime_error(what), final_tv(final_tv) {}
  double final_tv;
};

/// Exact evolution from `start` (even class) until both parity subsequences
/// are within eps of x_even / x_odd in total variation.
QuenchedConvergence quenched_convergence_check(const Environment& x, VertexId start, double eps,
                                               std::uint64_t max_pairs = 1'000'000);

}  // namespace errw
