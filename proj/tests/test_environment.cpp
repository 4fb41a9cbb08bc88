#include <doctest.h>

#include <cmath>
#include <memory>

#include "errw/environment.hpp"
#include "errw/stats.hpp"

using namespace errw;

namespace {

std::shared_ptr<const LadderGraph> square() {
  return std::make_shared<const LadderGraph>(tree_preset("segment-2"), 1);
}

Environment uniform(std::shared_ptr<const LadderGraph> g) {
  const std::size_t m = g->edge_count();
  return Environment(g, std::vector<double>(m, 1.0 / static_cast<double>(m)), Normalization::Simplex);
}

using Matrix = std::vector<std::vector<double>>;

// Dense transition matrix built edge by edge, independent of the library's
// push-forward loop.
Matrix dense_kernel(const Environment& x) {
  const auto& g = x.ladder();
  const std::size_t n = g.vertex_count();
  Matrix p(n, std::vector<double>(n, 0.0));
  std::vector<double> xv(n, 0.0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto ed = g.edge(e);
    xv[ed.u] += x.weight(e);
    xv[ed.v] += x.weight(e);
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto ed = g.edge(e);
    p[ed.u][ed.v] += x.weight(e) / xv[ed.u];
    p[ed.v][ed.u] += x.weight(e) / xv[ed.v];
  }
  return p;
}

std::vector<double> push(const Matrix& p, const std::vector<double>& mu) {
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) out[j] += mu[i] * p[i][j];
  }
  return out;
}

}  // namespace

TEST_CASE("vertex weights and transitions") {
  const auto g = square();
  const Environment x = uniform(g);
  double total = 0;
  for (VertexId v = 0; v < 4; ++v) {
    CHECK(vertex_weight(x, v) == doctest::Approx(0.5));
    total += vertex_weight(x, v);
  }
  CHECK(total == doctest::Approx(2.0));
  CHECK(transition_prob(x, 0, 1) == doctest::Approx(0.5));
  CHECK(transition_prob(x, 0, g->vertex_id(1, 1)) == 0.0);

  // Weights 3 and 1 at the origin.
  std::vector<double> w(4, 0.0);
  w[g->reference_edge()] = 3.0 / 8;
  w[g->horizontal_id(0, 0)] = 1.0 / 8;
  w[g->horizontal_id(0, 1)] = 2.0 / 8;
  w[g->rung_id(1, 0)] = 2.0 / 8;
  const Environment y(g, w, Normalization::Simplex);
  CHECK(transition_prob(y, 0, 1) == doctest::Approx(0.75));
  CHECK(transition_prob(y, 0, g->vertex_id(1, 0)) == doctest::Approx(0.25));

  const auto edge = std::make_shared<const LadderGraph>(tree_preset("segment-2"), 0);
  const Environment one(edge, {1.0}, Normalization::Simplex);
  CHECK(vertex_weight(one, 0) == 1.0);
  CHECK(vertex_weight(one, 1) == 1.0);
}

TEST_CASE("environment validation") {
  const auto g = square();
  CHECK_THROWS(Environment(g, {0.5, 0.5, 0.5, 0.5}, Normalization::Simplex));
  CHECK_THROWS(Environment(g, {0.5, 0.5}, Normalization::Simplex));
  CHECK_THROWS(Environment(g, {0.5, -0.5, 0.5, 0.5}, Normalization::Reference));
  CHECK_THROWS(Environment(g, {2.0, 1.0, 1.0, 1.0}, Normalization::Reference));
  const auto inf = std::make_shared<const LadderGraph>(tree_preset("segment-2"), std::nullopt);
  CHECK_THROWS(Environment(inf, {}, Normalization::Simplex));
  const Environment z(g, {0.5, 0.5, 0.0, 0.0}, Normalization::Simplex);
  CHECK(z.zero_edges() == 2);
  CHECK_THROWS(evolve_distribution(z, point_mass(*g, 0), 1));
}

TEST_CASE("quenched walk two-step return frequency") {
  const auto g = square();
  const Environment x = uniform(g);
  Rng rng(12);
  const std::uint64_t n = 100000;
  std::uint64_t back = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto r = simulate_rwre(x, g->start(), 2, rng);
    if (r.final_vertex == g->start()) ++back;
  }
  const double se = std::sqrt(0.25 / n);
  CHECK(std::abs(static_cast<double>(back) / n - 0.5) <= 4 * se);

  const auto edge = std::make_shared<const LadderGraph>(tree_preset("segment-2"), 0);
  const Environment one(edge, {1.0}, Normalization::Simplex);
  const auto r = simulate_rwre(one, 0, 7, rng, true);
  for (std::size_t t = 0; t < r.path->vertices.size(); ++t) CHECK(r.path->vertices[t] == t % 2);
}

TEST_CASE("exact evolution") {
  const auto g = square();
  const Environment x = uniform(g);
  const auto mu0 = point_mass(*g, 0);
  CHECK(evolve_distribution(x, mu0, 0).probs == mu0.probs);
  const auto one = evolve_distribution(x, mu0, 1);
  CHECK(one.probs[1] == doctest::Approx(0.5));
  CHECK(one.probs[g->vertex_id(1, 0)] == doctest::Approx(0.5));
  const auto two = evolve_distribution(x, mu0, 2);
  CHECK(two.probs[0] == doctest::Approx(0.5));
  CHECK(two.probs[g->vertex_id(1, 1)] == doctest::Approx(0.5));
  CHECK(two.probs[1] == 0.0);
}

TEST_CASE("evolution matches dense matrix powers") {
  Rng rng(2);
  for (const char* preset : {"segment-2", "path-3", "star-3"}) {
    const auto g = std::make_shared<const LadderGraph>(tree_preset(preset), 3);
    const Environment x = random_environment(g, rng);
    const Matrix p = dense_kernel(x);
    std::vector<double> mu = point_mass(*g, g->start()).probs;
    for (int t = 1; t <= 25; ++t) {
      mu = push(p, mu);
      const auto lib = evolve_distribution(x, point_mass(*g, g->start()), t);
      for (std::size_t v = 0; v < mu.size(); ++v) CHECK(lib.probs[v] == doctest::Approx(mu[v]).epsilon(1e-12));
    }
  }
}

TEST_CASE("stationary and parity laws") {
  const auto g = square();
  const Environment u = uniform(g);
  for (double p : stationary_distribution(u).probs) CHECK(p == doctest::Approx(0.25));
  const auto even = parity_equilibrium(u, Parity::Even);
  CHECK(even.probs[0] == doctest::Approx(0.5));
  CHECK(even.probs[g->vertex_id(1, 1)] == doctest::Approx(0.5));

  Rng rng(6);
  const auto big = std::make_shared<const LadderGraph>(tree_preset("segment-2"), 3);
  for (int rep = 0; rep < 10; ++rep) {
    const Environment x = random_environment(big, rng);
    const auto e = parity_equilibrium(x, Parity::Even);
    const auto o = parity_equilibrium(x, Parity::Odd);
    CHECK(e.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.total() == doctest::Approx(1.0).epsilon(1e-12));
    const auto xv = vertex_weights(x);
    for (std::size_t v = 0; v < xv.size(); ++v) CHECK(e.probs[v] + o.probs[v] == doctest::Approx(xv[v]));
    const auto law = mixture_start(e, x);
    CHECK(stats::tv_distance(law.marginal(1).probs, o.probs) < 1e-12);
    CHECK(stats::tv_distance(law.marginal(2).probs, e.probs) < 1e-12);
    // Detailed balance on every edge.
    for (EdgeId ed = 0; ed < big->edge_count(); ++ed) {
      const auto edge = big->edge(ed);
      CHECK(xv[edge.u] * transition_prob(x, edge.u, edge.v) ==
            doctest::Approx(xv[edge.v] * transition_prob(x, edge.v, edge.u)).epsilon(1e-12));
    }
  }
}

TEST_CASE("chain laws started from a point mass") {
  const auto g = std::make_shared<const LadderGraph>(tree_preset("segment-2"), 2);
  Rng rng(10);
  const Environment x = random_environment(g, rng);
  const VertexId v = g->vertex_id(1, 0);
  const auto law = mixture_start(point_mass(*g, v), x);
  const PathRecord p{{v, g->vertex_id(1, 1), g->vertex_id(2, 1)}};
  CHECK(law.probability(p) == doctest::Approx(path_probability(x, p)));
  CHECK(law.probability(PathRecord{{0, 1}}) == 0.0);
  CHECK(law.sample(5, rng).front() == v);
}

TEST_CASE("quenched convergence on the uniform square") {
  const auto g = square();
  const auto res = quenched_convergence_check(uniform(g), g->start(), 1e-8);
  CHECK(res.parity_support_exact);
  CHECK(res.tv_even.back() < 1e-8);
  CHECK(res.tv_odd.back() < 1e-8);
  CHECK(res.t_star_even + 1 == res.tv_even.size());
  for (std::size_t t = 1; t < res.tv_even.size(); ++t) CHECK(res.tv_even[t] <= res.tv_even[t - 1] + 1e-15);

  // Starting at equilibrium: zero distance at every even time.
  const Environment x = uniform(g);
  const auto law = mixture_start(parity_equilibrium(x, Parity::Even), x);
  for (int t = 0; t < 6; t += 2) {
    CHECK(stats::tv_distance(law.marginal(t).probs, parity_equilibrium(x, Parity::Even).probs) < 1e-15);
  }
}

TEST_CASE("reversibility and the ratio bound") {
  const auto g = std::make_shared<const LadderGraph>(tree_preset("segment-2"), 3);
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const Environment x = random_environment(g, rng);
    const auto xv = vertex_weights(x);
    for (VertexId v = 0; v < g->vertex_count(); ++v) {
      for (int t = 0; t <= 6; ++t) {
        const double fwd = evolve_distribution(x, point_mass(*g, 0), t).probs[v];
        const double bwd = evolve_distribution(x, point_mass(*g, v), t).probs[0];
        CHECK(std::abs(xv[0] * fwd - xv[v] * bwd) <= 1e-12);
        CHECK(fwd <= xv[v] / xv[0] + 1e-12);
      }
    }
  }
}
