#include "errw/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errw/stats.hpp"

namespace errw {

std::string to_string(Normalization n) {
  return n == Normalization::Simplex ? "simplex" : "reference";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "simplex") return Normalization::Simplex;
  if (s == "reference") return Normalization::Reference;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

Environment::Environment(std::shared_ptr<const LadderGraph> ladder, std::vector<double> weights,
                         Normalization normalization)
    : ladder_(std::move(ladder)), weights_(std::move(weights)), normalization_(normalization) {
  if (!ladder_ || !ladder_->bounded()) {
    throw std::invalid_argument("environments live on bounded ladders");
  }
  if (weights_.size() != ladder_->edge_count()) {
    throw std::invalid_argument("environment has " + std::to_string(weights_.size()) +
                                " weights for " + std::to_string(ladder_->edge_count()) + " edges");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("environment weights must be finite and nonnegative");
    }
  }
  if (normalization_ == Normalization::Simplex) {
    const double s = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::fabs(s - 1.0) > kSimplexTolerance) {
      throw std::invalid_argument("simplex environment sums to " + std::to_string(s));
    }
  } else if (weights_[ladder_->reference_edge()] != 1.0) {
    throw std::invalid_argument("reference environment must have weight 1 on the reference edge");
  }
}

std::size_t Environment::zero_edges() const {
  return static_cast<std::size_t>(std::count(weights_.begin(), weights_.end(), 0.0));
}

Environment random_environment(std::shared_ptr<const LadderGraph> ladder, Rng& rng) {
  std::vector<double> w(ladder->edge_count());
  for (double& x : w) {
    // Uniform in (0, 1): never 0, never 1.
    const double u = (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;
    x = -std::log(u);
  }
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  const double s2 = std::accumulate(w.begin(), w.end(), 0.0);
  *std::max_element(w.begin(), w.end()) += 1.0 - s2;
  return Environment(std::move(ladder), std::move(w), Normalization::Simplex);
}

double VertexDistribution::total() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

void VertexDistribution::validate(double tolerance) const {
  if (probs.empty()) throw std::invalid_argument("empty vertex distribution");
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("vertex distribution has a negative entry");
  }
  if (std::fabs(total() - 1.0) > tolerance) {
    throw std::invalid_argument("vertex distribution sums to " + std::to_string(total()));
  }
}

VertexDistribution point_mass(const LadderGraph& ladder, VertexId v) {
  VertexDistribution mu;
  mu.probs.assign(ladder.vertex_count(), 0.0);
  mu.probs.at(v) = 1.0;
  return mu;
}

double vertex_weight(const Environment& x, VertexId u) {
  double s = 0.0;
  for (const auto& inc : x.ladder().neighbors(u)) s += x.weight(inc.edge);
  return s;
}

std::vector<double> vertex_weights(const Environment& x) {
  std::vector<double> out(x.ladder().vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = vertex_weight(x, static_cast<VertexId>(v));
  return out;
}

double transition_prob(const Environment& x, VertexId from, VertexId to) {
  const auto& ladder = x.ladder();
  if (!ladder.contains_vertex(from) || !ladder.contains_vertex(to)) {
    throw std::out_of_range("transition_prob: vertex outside the ladder");
  }
  const auto e = ladder.edge_between(from, to);
  if (!e) return 0.0;
  return x.weight(*e) / vertex_weight(x, from);
}

double path_probability(const Environment& x, const PathRecord& path) {
  if (path.vertices.empty()) throw std::invalid_argument("path has no start vertex");
  double p = 1.0;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const auto e = x.ladder().edge_between(path.vertices[i - 1], path.vertices[i]);
    if (!e) return 0.0;
    const double xu = vertex_weight(x, path.vertices[i - 1]);
    if (xu == 0.0) return 0.0;
    p *= x.weight(*e) / xu;
  }
  return p;
}

QuenchedWalk::QuenchedWalk(const Environment& x, VertexId start) : x_(&x), position_(start) {
  if (!x.ladder().contains_vertex(start)) throw std::invalid_argument("start outside the ladder");
  if (vertex_weight(x, start) == 0.0) {
    throw std::invalid_argument("start vertex has zero total weight");
  }
}

VertexId QuenchedWalk::step(Rng& rng) {
  const auto inc = x_->ladder().neighbors(position_);
  double cumulative[16];
  double total = 0.0;
  for (std::size_t j = 0; j < inc.size(); ++j) {
    total += x_->weight(inc[j].edge);
    cumulative[j] = total;
  }
  const double u = rng.uniform() * total;
  std::size_t chosen = 0;
  while (chosen + 1 < inc.size() && (cumulative[chosen] <= u || x_->weight(inc[chosen].edge) == 0.0)) {
    ++chosen;
  }
  position_ = inc[chosen].neighbor;
  ++time_;
  return position_;
}

QuenchedRun simulate_rwre(const Environment& x, VertexId start, std::uint64_t steps, Rng& rng,
                          bool keep_path) {
  QuenchedRun run;
  QuenchedWalk walk(x, start);
  const auto sites = static_cast<VertexId>(x.ladder().sites());
  run.counts.counts.assign(x.ladder().edge_count(), 0);
  run.max_level = static_cast<int>(start / sites);
  if (keep_path) run.path.emplace(PathRecord{{start}});
  for (std::uint64_t t = 0; t < steps; ++t) {
    const VertexId from = walk.position();
    const VertexId to = walk.step(rng);
    ++run.counts.counts[*x.ladder().edge_between(from, to)];
    ++run.counts.total;
    run.max_level = std::max(run.max_level, static_cast<int>(to / sites));
    if (keep_path) run.path->vertices.push_back(to);
  }
  run.final_vertex = walk.position();
  return run;
}

namespace {

void require_irreducible(const Environment& x, const char* op) {
  if (!x.strictly_positive()) {
    throw std::invalid_argument(std::string(op) + ": environment has " +
                                std::to_string(x.zero_edges()) +
                                " zero-weight edges; filter them upstream");
  }
}

void require_simplex(const Environment& x, const char* op) {
  if (x.normalization() != Normalization::Simplex) {
    throw std::invalid_argument(std::string(op) + " needs a simplex-normalized environment");
  }
}

}  // namespace

VertexDistribution evolve_distribution(const Environment& x, const VertexDistribution& mu,
                                       std::uint64_t steps) {
  require_irreducible(x, "evolve_distribution");
  const auto& ladder = x.ladder();
  const std::size_t nv = ladder.vertex_count();
  if (mu.probs.size() != nv) throw std::invalid_argument("distribution size does not match ladder");
  const auto xv = vertex_weights(x);
  const std::size_t ne = ladder.edge_count();
  std::vector<VertexId> eu(ne), ev(ne);
  std::vector<double> p_uv(ne), p_vu(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto edge = ladder.edge(static_cast<EdgeId>(e));
    eu[e] = edge.u;
    ev[e] = edge.v;
    p_uv[e] = x.weights()[e] / xv[edge.u];
    p_vu[e] = x.weights()[e] / xv[edge.v];
  }
  VertexDistribution cur = mu;
  VertexDistribution next;
  next.probs.assign(nv, 0.0);
  for (std::uint64_t s = 0; s < steps; ++s) {
    std::fill(next.probs.begin(), next.probs.end(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
      next.probs[ev[e]] += cur.probs[eu[e]] * p_uv[e];
      next.probs[eu[e]] += cur.probs[ev[e]] * p_vu[e];
    }
    std::swap(cur, next);
  }
  return cur;
}

VertexDistribution stationary_distribution(const Environment& x) {
  require_simplex(x, "stationary_distribution");
  require_irreducible(x, "stationary_distribution");
  VertexDistribution pi;
  pi.probs = vertex_weights(x);
  for (double& p : pi.probs) p /= 2.0;
  const auto next = evolve_distribution(x, pi, 1);
  if (stats::tv_distance(pi.probs, next.probs) > 1e-12) {
    throw std::logic_error("stationary_distribution: x_v/2 failed the invariance check");
  }
  return pi;
}

VertexDistribution parity_equilibrium(const Environment& x, Parity parity) {
  require_simplex(x, "parity_equilibrium");
  VertexDistribution mu;
  mu.probs = vertex_weights(x);
  for (std::size_t v = 0; v < mu.probs.size(); ++v) {
    if (x.ladder().parity(static_cast<VertexId>(v)) != parity) mu.probs[v] = 0.0;
  }
  return mu;
}

ChainLaw::ChainLaw(VertexDistribution initial, const Environment& x)
    : initial_(std::move(initial)), x_(&x) {
  initial_.validate();
  if (initial_.probs.size() != x.ladder().vertex_count()) {
    throw std::invalid_argument("initial distribution size does not match ladder");
  }
}

double ChainLaw::probability(const PathRecord& path) const {
  if (path.vertices.empty()) throw std::invalid_argument("path has no start vertex");
  return initial_.probs.at(path.front()) * path_probability(*x_, path);
}

PathRecord ChainLaw::sample(std::uint64_t steps, Rng& rng) const {
  const double u = rng.uniform();
  double c = 0.0;
  VertexId start = 0;
  for (std::size_t v = 0; v < initial_.probs.size(); ++v) {
    if (initial_.probs[v] == 0.0) continue;
    start = static_cast<VertexId>(v);
    c += initial_.probs[v];
    if (u < c) break;
  }
  return *simulate_rwre(*x_, start, steps, rng, true).path;
}

ChainLaw mixture_start(const VertexDistribution& mu, const Environment& x) {
  return ChainLaw(mu, x);
}

QuenchedConvergence quenched_convergence_check(const Environment& x, VertexId start, double eps,
                                               std::uint64_t max_pairs) {
  require_simplex(x, "quenched_convergence_check");
  require_irreducible(x, "quenched_convergence_check");
  const auto& ladder = x.ladder();
  if (ladder.parity(start) != Parity::Even) {
    throw std::invalid_argument("quenched_convergence_check: start must be in the even class");
  }
  const auto even = parity_equilibrium(x, Parity::Even);
  const auto odd = parity_equilibrium(x, Parity::Odd);
  QuenchedConvergence out;
  bool even_done = false, odd_done = false;
  auto law = point_mass(ladder, start);
  auto support_ok = [&](const VertexDistribution& mu, Parity allowed) {
    for (std::size_t v = 0; v < mu.probs.size(); ++v) {
      if (mu.probs[v] != 0.0 && ladder.parity(static_cast<VertexId>(v)) != allowed) return false;
    }
    return true;
  };
  for (std::uint64_t t = 0; t <= max_pairs; ++t) {
    // law = law of X_{2t}
    out.parity_support_exact = out.parity_support_exact && support_ok(law, Parity::Even);
    out.tv_even.push_back(stats::tv_distance(law.probs, even.probs));
    auto odd_law = evolve_distribution(x, law, 1);
    out.parity_support_exact = out.parity_support_exact && support_ok(odd_law, Parity::Odd);
    out.tv_odd.push_back(stats::tv_distance(odd_law.probs, odd.probs));
    if (!even_done && out.tv_even.back() < eps) {
      even_done = true;
      out.t_star_even = t;
    }
    if (!odd_done && out.tv_odd.back() < eps) {
      odd_done = true;
      out.t_star_odd = t;
    }
    if (even_done && odd_done) return out;
    law = evolve_distribution(x, odd_law, 1);
  }
  throw ConvergenceError("quenched chain did not reach TV < " + std::to_string(eps) + " within " +
                             std::to_string(max_pairs) + " double steps",
                         std::max(out.tv_even.back(), out.tv_odd.back()));
}

}  // namespace errw
