#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace errw {

/// Neighbor of a tree vertex together with the connecting tree edge.
struct TreeIncidence {
  int edge;      ///< index into FiniteTree::edges()
  int neighbor;  ///< dense vertex index
};

/// A finite tree G = (V, E) with arbitrary integer labels.
///
/// Vertices are stored densely in input order; edges keep their input order,
/// which fixes the canonical numbering of rung edges in every ladder built on
/// top of the tree.
class FiniteTree {
 public:
  /// Validates connectivity and acyclicity; throws std::invalid_argument.
  FiniteTree(std::vector<long> labels, std::vector<std::pair<long, long>> edges);

  int vertex_count() const { return static_cast<int>(labels_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::vector<long>& labels() const { return labels_; }
  long label(int index) const { return labels_.at(index); }
  int index_of(long label) const;

  /// Edges as dense index pairs, in input order.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Incident edges of `v` sorted by edge index.
  const std::vector<TreeIncidence>& incident(int v) const { return adjacency_.at(v); }

  int max_degree() const;

  /// Graph distance between two dense vertex indices.
  int distance(int from, int to) const;

  bool operator==(const FiniteTree& other) const {
    return labels_ == other.labels_ && edges_ == other.edges_;
  }

 private:
  std::vector<long> labels_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<TreeIncidence>> adjacency_;
};

/// Named presets:
///   segment-k : path on k vertices labelled 1..k (segment-2 is V = {1,2})
///   path-k    : path with k edges, vertices labelled 0..k
///   star-k    : center 0 joined to leaves 1..k
FiniteTree tree_preset(std::string_view name);

/// Parses {"vertices": [...], "edges": [[u, v], ...]}.
FiniteTree tree_from_json_text(const std::string& text);
FiniteTree tree_from_file(const std::string& path);
std::string tree_to_json_text(const FiniteTree& tree);

}  // namespace errw
