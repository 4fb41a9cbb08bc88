#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "errw/tree.hpp"

namespace errw {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class EdgeKind { Rung, Horizontal };
enum class Parity { Even, Odd };

struct LadderVertex {
  int level;
  int site;  ///< dense tree vertex index
  bool operator==(const LadderVertex&) const = default;
};

struct LadderEdge {
  EdgeKind kind;
  int level;  ///< |e| = min of the endpoint levels
  int index;  ///< tree edge for a rung, tree vertex for a horizontal edge
  VertexId u;
  VertexId v;
};

struct Incidence {
  EdgeId edge;
  VertexId neighbor;
};

struct ParityClasses {
  std::vector<VertexId> even;
  std::vector<VertexId> odd;
};

/// The ladder N0 x G over a finite tree G, or its truncation to levels 0..n.
///
/// Ids are dense and closed-form. Vertex (i, v) has id i*|V| + v. Edges are
/// numbered level-major: the |E| rungs of level i (tree edge order) come
/// first, then the |V| horizontal edges {(i, v), (i+1, v)} (tree vertex
/// order). A truncated ladder therefore uses exactly the id prefix of the
/// unbounded one, and the topology never has to be grown explicitly: an
/// unbounded ladder answers every query arithmetically, while a bounded one
/// also keeps an adjacency table for the hot sampling loops.
class LadderGraph {
 public:
  /// `depth` empty means unbounded. `start_site` and `rung_edge` are dense
  /// tree indices and default to vertex 0 and its first incident edge.
  LadderGraph(FiniteTree tree, std::optional<int> depth, std::optional<int> start_site = {},
              std::optional<int> rung_edge = {});

  const FiniteTree& tree() const { return tree_; }
  std::optional<int> depth() const { return depth_; }
  bool bounded() const { return depth_.has_value(); }
  int sites() const { return tree_.vertex_count(); }
  int max_degree() const { return tree_.max_degree() + 2; }

  VertexId start() const { return vertex_id(0, start_site_); }
  int start_site() const { return start_site_; }
  int rung_choice() const { return rung_edge_; }
  EdgeId reference_edge() const { return rung_id(0, rung_edge_); }

  VertexId vertex_id(int level, int site) const;
  LadderVertex vertex(VertexId id) const;
  EdgeId rung_id(int level, int tree_edge) const;
  /// Horizontal edge between (level, site) and (level + 1, site).
  EdgeId horizontal_id(int level, int site) const;
  LadderEdge edge(EdgeId id) const;

  bool contains_vertex(VertexId id) const;
  bool contains_edge(EdgeId id) const;

  int vertex_level(VertexId id) const;
  int edge_level(EdgeId id) const;

  /// Sizes of the bounded ladder; throw std::logic_error when unbounded.
  std::size_t vertex_count() const;
  std::size_t edge_count() const;
  /// Number of vertices/edges whose endpoints all lie in levels 0..level.
  std::size_t vertex_count_through(int level) const;
  std::size_t edge_count_through(int level) const;

  /// Incident edges in increasing edge-id order. `out` must hold
  /// max_degree() entries; returns the number written.
  int incident(VertexId v, Incidence* out) const;
  /// Same as above from the precomputed table (bounded ladders only).
  std::span<const Incidence> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  std::optional<EdgeId> edge_between(VertexId u, VertexId v) const;

  Parity parity(VertexId v) const;
  /// Bipartition of the bounded ladder by path-length parity from start().
  ParityClasses parity_classes() const;
  ParityClasses parity_classes_through(int level) const;

 private:
  void check_vertex(VertexId id) const;
  void check_edge(EdgeId id) const;

  FiniteTree tree_;
  std::optional<int> depth_;
  int start_site_ = 0;
  int rung_edge_ = 0;
  std::uint32_t block_ = 0;  ///< edges per level block: |E| + |V|
  std::vector<int> site_parity_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Incidence> adjacency_;
};

}  // namespace errw
