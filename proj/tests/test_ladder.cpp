#include <doctest.h>

#include <algorithm>
#include <queue>
#include <set>

#include "errw/ladder.hpp"
#include "errw/rng.hpp"

using namespace errw;

namespace {

FiniteTree random_tree(int n, Rng& rng) {
  std::vector<long> labels;
  for (int i = 0; i < n; ++i) labels.push_back(10 * i + 3);
  std::vector<std::pair<long, long>> edges;
  for (int i = 1; i < n; ++i) edges.push_back({labels[rng.below(i)], labels[i]});
  return FiniteTree(labels, edges);
}

// Breadth-first distances from the start, computed from incident() only.
std::vector<int> bfs_distance(const LadderGraph& g) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::vector<Incidence> buf(g.max_degree());
  std::queue<VertexId> q;
  dist[g.start()] = 0;
  q.push(g.start());
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop();
    const int k = g.incident(u, buf.data());
    for (int j = 0; j < k; ++j) {
      if (dist[buf[j].neighbor] < 0) {
        dist[buf[j].neighbor] = dist[u] + 1;
        q.push(buf[j].neighbor);
      }
    }
  }
  return dist;
}

}  // namespace

TEST_CASE("sizes of small ladders") {
  const LadderGraph square(tree_preset("segment-2"), 1);
  CHECK(square.vertex_count() == 4);
  CHECK(square.edge_count() == 4);

  const LadderGraph flat(tree_preset("segment-2"), 0);
  CHECK(flat.vertex_count() == 2);
  CHECK(flat.edge_count() == 1);

  const LadderGraph three(tree_preset("segment-3"), 2);
  CHECK(three.vertex_count() == 9);
  CHECK(three.edge_count() == 12);
}

TEST_CASE("closed-form sizes agree with adjacency for every small tree") {
  Rng rng(5);
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      const FiniteTree tree = random_tree(n, rng);
      for (int depth = 0; depth <= 10; ++depth) {
        const LadderGraph g(tree, depth);
        CHECK(g.vertex_count() == static_cast<std::size_t>((depth + 1) * n));
        CHECK(g.edge_count() == static_cast<std::size_t>((depth + 1) * (n - 1) + depth * n));
        // Degree sum over the adjacency table counts every edge twice.
        std::size_t degree_sum = 0;
        std::set<EdgeId> seen;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
          for (const auto& inc : g.neighbors(v)) {
            ++degree_sum;
            seen.insert(inc.edge);
            const LadderEdge e = g.edge(inc.edge);
            CHECK(((e.u == v && e.v == inc.neighbor) || (e.v == v && e.u == inc.neighbor)));
          }
        }
        CHECK(degree_sum == 2 * g.edge_count());
        CHECK(seen.size() == g.edge_count());
        CHECK(*seen.rbegin() + 1 == g.edge_count());
      }
    }
  }
}

TEST_CASE("truncated ladders use the id prefix of the unbounded ladder") {
  const FiniteTree tree = tree_preset("star-3");
  const LadderGraph inf(tree, std::nullopt);
  const LadderGraph fin(tree, 4);
  CHECK_THROWS_AS(inf.edge_count(), std::logic_error);
  for (EdgeId e = 0; e < fin.edge_count(); ++e) {
    const LadderEdge a = fin.edge(e), b = inf.edge(e);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.level == b.level);
    CHECK(inf.edge_between(a.u, a.v) == e);
  }
  CHECK_FALSE(fin.contains_edge(static_cast<EdgeId>(fin.edge_count())));
  CHECK(inf.contains_edge(static_cast<EdgeId>(fin.edge_count())));
  CHECK(fin.edge_count_through(2) == 3 * 3 + 2 * 4);
}

TEST_CASE("levels of vertices and edges") {
  const LadderGraph g(tree_preset("segment-2"), std::nullopt);
  CHECK(g.vertex_level(g.vertex_id(3, 1)) == 3);
  CHECK(g.edge_level(g.horizontal_id(2, 0)) == 2);
  CHECK(g.edge_level(g.rung_id(5, 0)) == 5);
  const LadderEdge h = g.edge(g.horizontal_id(2, 1));
  CHECK(h.kind == EdgeKind::Horizontal);
  CHECK(std::min(g.vertex_level(h.u), g.vertex_level(h.v)) == 2);
}

TEST_CASE("parity classes match breadth-first path lengths") {
  const LadderGraph square(tree_preset("segment-2"), 1);
  const auto classes = square.parity_classes();
  const std::vector<VertexId> even{square.vertex_id(0, 0), square.vertex_id(1, 1)};
  const std::vector<VertexId> odd{square.vertex_id(0, 1), square.vertex_id(1, 0)};
  CHECK(classes.even == even);
  CHECK(classes.odd == odd);
  CHECK(square.parity(square.start()) == Parity::Even);

  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const FiniteTree tree = random_tree(2 + static_cast<int>(rng.below(5)), rng);
    const int start = static_cast<int>(rng.below(tree.vertex_count()));
    const LadderGraph g(tree, 1 + static_cast<int>(rng.below(5)), start);
    const auto dist = bfs_distance(g);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      CHECK(dist[v] >= 0);
      CHECK((g.parity(v) == Parity::Even) == (dist[v] % 2 == 0));
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const LadderEdge ed = g.edge(e);
      CHECK(g.parity(ed.u) != g.parity(ed.v));
    }
  }
}

TEST_CASE("start vertex and reference rung") {
  const FiniteTree tree = tree_preset("path-3");
  const LadderGraph g(tree, 2, tree.index_of(2), 1);
  CHECK(g.start() == g.vertex_id(0, 2));
  const LadderEdge ref = g.edge(g.reference_edge());
  CHECK(ref.kind == EdgeKind::Rung);
  CHECK(ref.level == 0);
  CHECK_THROWS(LadderGraph(tree, 2, 7));
  CHECK_THROWS(LadderGraph(tree, -1));
  CHECK_THROWS(LadderGraph(tree, 2, 0, 5));
}

TEST_CASE("tree validation") {
  CHECK_THROWS(FiniteTree({1, 2, 3}, {{1, 2}}));
  CHECK_THROWS(FiniteTree({1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}}));
  CHECK_THROWS(FiniteTree({1, 1}, {{1, 1}}));
  CHECK_THROWS(tree_preset("cube-3"));
  const FiniteTree t = tree_from_json_text(R"({"vertices": [5, 7, 9], "edges": [[5, 7], [7, 9]]})");
  CHECK(t.distance(t.index_of(5), t.index_of(9)) == 2);
  CHECK(tree_from_json_text(tree_to_json_text(t)) == t);
}
