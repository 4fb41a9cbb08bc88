#include <doctest.h>

#include <cmath>
#include <map>

#include "errw/exact.hpp"
#include "errw/walk.hpp"

using namespace errw;

namespace {

LadderGraph square() { return LadderGraph(tree_preset("segment-2"), 1); }

// Frequency check within 4 standard errors of p.
void check_frequency(std::uint64_t hits, std::uint64_t n, double p) {
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(hits) / static_cast<double>(n) - p) <= 4 * se);
}

}  // namespace

TEST_CASE("initial weights") {
  const LadderGraph g = square();
  ReinforcementState s(g, 1.0, g.start());
  for (EdgeId e = 0; e < 4; ++e) CHECK(s.weight(e) == 1.0);

  EdgeCounts init;
  init.counts.assign(4, 0);
  init.counts[g.reference_edge()] = 3;
  init.total = 3;
  ReinforcementState t(g, 2.0, g.start(), &init);
  for (EdgeId e = 0; e < 4; ++e) CHECK(t.weight(e) == (e == g.reference_edge() ? 5.0 : 2.0));

  CHECK_THROWS_AS(ReinforcementState(g, 0.0, g.start()), std::invalid_argument);
  CHECK_THROWS_AS(ReinforcementState(g, 1.0, 99), std::invalid_argument);
}

TEST_CASE("a_min warning on the two-vertex tree") {
  CHECK(a_min_warning(tree_preset("segment-2"), 0.75).has_value());
  CHECK(a_min_warning(tree_preset("segment-2"), 0.5).has_value());
  CHECK_FALSE(a_min_warning(tree_preset("segment-2"), 0.76).has_value());
  CHECK_FALSE(a_min_warning(tree_preset("segment-3"), 0.5).has_value());
  const LadderGraph g(tree_preset("segment-2"), 3);
  CHECK_NOTHROW(init_walk(g, 0.75));
}

TEST_CASE("first steps follow the reinforced transition law") {
  const LadderGraph g = square();
  const VertexId b = g.vertex_id(0, 1);
  const std::uint64_t n = 100000;
  std::uint64_t to_b = 0, back = 0, after_b = 0;
  Rng rng(17);
  for (std::uint64_t i = 0; i < n; ++i) {
    ReinforcementState s(g, 1.0, g.start());
    if (s.step(rng) != b) continue;
    ++to_b;
    ++after_b;
    if (s.step(rng) == g.start()) ++back;
  }
  check_frequency(to_b, n, 0.5);
  check_frequency(back, after_b, 2.0 / 3.0);
}

TEST_CASE("depth-0 ladder alternates") {
  const LadderGraph g(tree_preset("segment-2"), 0);
  ReinforcementState s(g, 1.0, g.start());
  Rng rng(1);
  for (int t = 1; t <= 50; ++t) CHECK(s.step(rng) == static_cast<VertexId>(t % 2));
}

TEST_CASE("run bookkeeping") {
  const LadderGraph g(tree_preset("segment-2"), 30);
  Rng rng(3);
  ReinforcementState s(g, 2.0, g.start());
  const auto r0 = run(s, 0, rng, RunOptions{});
  REQUIRE(r0.path.has_value());
  CHECK(r0.path->length() == 0);
  CHECK(s.time() == 0);
  CHECK(s.counts().total == 0);

  LevelTracker levels(s);
  RunOptions opts;
  opts.keep_path = true;
  const std::uint64_t T = 1'000'000;
  const auto r = run(s, T, rng, opts, levels);
  CHECK(s.counts().total == T);
  std::uint64_t sum = 0;
  for (auto c : s.counts().counts) sum += c;
  CHECK(sum == T);
  CHECK(s.total_weight() == doctest::Approx(2.0 * static_cast<double>(g.edge_count()) + T).epsilon(1e-15));
  int max_level = 0;
  for (auto v : r.path->vertices) max_level = std::max(max_level, g.vertex_level(v));
  CHECK(levels.max_level() == max_level);
  CHECK(levels.final_level() == g.vertex_level(s.position()));
  CHECK(crossing_counts(g, *r.path) == s.counts());
}

TEST_CASE("weight conservation on the unbounded ladder") {
  const LadderGraph g(tree_preset("star-2"), std::nullopt);
  Rng rng(8);
  ReinforcementState s(g, 0.5, g.start());
  for (std::uint64_t t = 1; t <= 20000; ++t) {
    s.step(rng);
    if (t % 997 == 0) {
      const double edges = static_cast<double>(g.edge_count_through(s.materialized_levels()));
      CHECK(s.total_weight() == doctest::Approx(0.5 * edges + static_cast<double>(t)));
    }
  }
}

TEST_CASE("checkpoints and callbacks see the same trajectory") {
  const LadderGraph g(tree_preset("path-2"), std::nullopt);
  Rng r1(21), r2(21);
  ReinforcementState a(g, 1.0, g.start()), b(g, 1.0, g.start());
  CheckpointRecorder rec(a, {0, 10, 100, 1000});
  RunOptions keep;
  keep.keep_path = true;
  const auto pa = run(a, 1000, r1, keep, rec);
  std::vector<VertexId> seen;
  std::vector<StepCallback> cbs{[&](const ReinforcementState& s, VertexId, EdgeId) { seen.push_back(s.position()); }};
  run_with_callbacks(b, 1000, r2, RunOptions{}, cbs);
  CHECK(std::equal(seen.begin(), seen.end(), pa.path->vertices.begin() + 1));
  REQUIRE(rec.samples().size() == 4);
  for (const auto& smp : rec.samples()) CHECK(smp.vertex == pa.path->vertices[smp.time]);
}

TEST_CASE("observer failures carry the time") {
  struct Failing {
    void on_step(const ReinforcementState& s, VertexId, EdgeId) {
      if (s.time() == 5) throw std::runtime_error("boom");
    }
  } bad;
  const LadderGraph g = square();
  ReinforcementState s(g, 1.0, g.start());
  Rng rng(1);
  CHECK_THROWS_AS(run(s, 10, rng, RunOptions{}, bad), ObserverError);
}

TEST_CASE("short-path frequencies match exact probabilities") {
  // Monte Carlo law of (X_0..X_3) against the exact product formula.
  const LadderGraph g(tree_preset("segment-2"), 2);
  const Rational a = parse_rational("3/2");
  const std::uint64_t n = 200000;
  std::map<std::vector<VertexId>, std::uint64_t> freq;
  Rng rng(33);
  for (std::uint64_t i = 0; i < n; ++i) {
    ReinforcementState s(g, 1.5, g.start());
    std::vector<VertexId> p{s.position()};
    for (int t = 0; t < 3; ++t) p.push_back(s.step(rng));
    ++freq[p];
  }
  const auto paths = enumerate_paths(g, g.start(), 3, 1000);
  for (const auto& p : paths) {
    const double prob = path_probability_exact(g, a, p).get_d();
    const auto it = freq.find(p.vertices);
    check_frequency(it == freq.end() ? 0 : it->second, n, prob);
  }
}
