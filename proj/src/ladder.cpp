#include "errw/ladder.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace errw {

LadderGraph::LadderGraph(FiniteTree tree, std::optional<int> depth, std::optional<int> start_site,
                         std::optional<int> rung_edge)
    : tree_(std::move(tree)), depth_(depth) {
  if (depth_ && *depth_ < 0) throw std::invalid_argument("ladder depth must be >= 0");
  start_site_ = start_site.value_or(0);
  if (start_site_ < 0 || start_site_ >= tree_.vertex_count()) {
    throw std::invalid_argument("start vertex is not a tree vertex");
  }
  if (rung_edge) {
    rung_edge_ = *rung_edge;
    if (rung_edge_ < 0 || rung_edge_ >= tree_.edge_count()) {
      throw std::invalid_argument("reference rung is not a tree edge");
    }
    const auto [a, b] = tree_.edges()[rung_edge_];
    if (a != start_site_ && b != start_site_) {
      throw std::invalid_argument("reference rung is not incident to the start vertex");
    }
  } else {
    rung_edge_ = tree_.incident(start_site_).front().edge;
  }
  block_ = static_cast<std::uint32_t>(tree_.edge_count() + tree_.vertex_count());

  site_parity_.resize(tree_.vertex_count());
  for (int v = 0; v < tree_.vertex_count(); ++v) {
    site_parity_[v] = tree_.distance(start_site_, v) % 2;
  }

  if (depth_) {
    const std::size_t n = vertex_count();
    offsets_.assign(n + 1, 0);
    std::vector<Incidence> buf(max_degree());
    for (std::size_t v = 0; v < n; ++v) {
      const int k = incident(static_cast<VertexId>(v), buf.data());
      adjacency_.insert(adjacency_.end(), buf.begin(), buf.begin() + k);
      offsets_[v + 1] = static_cast<std::uint32_t>(adjacency_.size());
    }
  }
}

VertexId LadderGraph::vertex_id(int level, int site) const {
  if (level < 0 || (depth_ && level > *depth_) || site < 0 || site >= sites()) {
    throw std::out_of_range("vertex (" + std::to_string(level) + ", " + std::to_string(site) +
                            ") is not in the ladder");
  }
  return static_cast<VertexId>(level) * static_cast<VertexId>(sites()) +
         static_cast<VertexId>(site);
}

LadderVertex LadderGraph::vertex(VertexId id) const {
  check_vertex(id);
  const auto n = static_cast<VertexId>(sites());
  return {static_cast<int>(id / n), static_cast<int>(id % n)};
}

EdgeId LadderGraph::rung_id(int level, int tree_edge) const {
  if (level < 0 || (depth_ && level > *depth_) || tree_edge < 0 ||
      tree_edge >= tree_.edge_count()) {
    throw std::out_of_range("rung is not in the ladder");
  }
  return static_cast<EdgeId>(level) * block_ + static_cast<EdgeId>(tree_edge);
}

EdgeId LadderGraph::horizontal_id(int level, int site) const {
  if (level < 0 || (depth_ && level >= *depth_) || site < 0 || site >= sites()) {
    throw std::out_of_range("horizontal edge is not in the ladder");
  }
  return static_cast<EdgeId>(level) * block_ + static_cast<EdgeId>(tree_.edge_count() + site);
}

LadderEdge LadderGraph::edge(EdgeId id) const {
  check_edge(id);
  const int level = static_cast<int>(id / block_);
  const int within = static_cast<int>(id % block_);
  const auto n = static_cast<VertexId>(sites());
  const VertexId base = static_cast<VertexId>(level) * n;
  if (within < tree_.edge_count()) {
    const auto [a, b] = tree_.edges()[within];
    return {EdgeKind::Rung, level, within, base + static_cast<VertexId>(a),
            base + static_cast<VertexId>(b)};
  }
  const int site = within - tree_.edge_count();
  return {EdgeKind::Horizontal, level, site, base + static_cast<VertexId>(site),
          base + n + static_cast<VertexId>(site)};
}

bool LadderGraph::contains_vertex(VertexId id) const {
  return !depth_ || id < vertex_count();
}

bool LadderGraph::contains_edge(EdgeId id) const {
  return !depth_ || id < edge_count();
}

void LadderGraph::check_vertex(VertexId id) const {
  if (!contains_vertex(id)) {
    throw std::out_of_range("unknown vertex id " + std::to_string(id));
  }
}

void LadderGraph::check_edge(EdgeId id) const {
  if (!contains_edge(id)) throw std::out_of_range("unknown edge id " + std::to_string(id));
}

int LadderGraph::vertex_level(VertexId id) const { return vertex(id).level; }

int LadderGraph::edge_level(EdgeId id) const {
  check_edge(id);
  return static_cast<int>(id / block_);
}

std::size_t LadderGraph::vertex_count() const {
  if (!depth_) throw std::logic_error("unbounded ladder has no finite vertex count");
  return vertex_count_through(*depth_);
}

std::size_t LadderGraph::edge_count() const {
  if (!depth_) throw std::logic_error("unbounded ladder has no finite edge count");
  return edge_count_through(*depth_);
}

std::size_t LadderGraph::vertex_count_through(int level) const {
  return static_cast<std::size_t>(level + 1) * static_cast<std::size_t>(sites());
}

std::size_t LadderGraph::edge_count_through(int level) const {
  return static_cast<std::size_t>(level) * block_ + static_cast<std::size_t>(tree_.edge_count());
}

int LadderGraph::incident(VertexId v, Incidence* out) const {
  const auto [level, site] = vertex(v);
  const auto n = static_cast<VertexId>(sites());
  int k = 0;
  if (level > 0) {
    out[k++] = {static_cast<EdgeId>(level - 1) * block_ +
                    static_cast<EdgeId>(tree_.edge_count() + site),
                v - n};
  }
  const VertexId base = static_cast<VertexId>(level) * n;
  for (const auto& inc : tree_.incident(site)) {
    out[k++] = {static_cast<EdgeId>(level) * block_ + static_cast<EdgeId>(inc.edge),
                base + static_cast<VertexId>(inc.neighbor)};
  }
  if (!depth_ || level < *depth_) {
    out[k++] = {static_cast<EdgeId>(level) * block_ +
                    static_cast<EdgeId>(tree_.edge_count() + site),
                v + n};
  }
  return k;
}

std::optional<EdgeId> LadderGraph::edge_between(VertexId u, VertexId v) const {
  std::vector<Incidence> buf(max_degree());
  const int k = incident(u, buf.data());
  for (int i = 0; i < k; ++i) {
    if (buf[i].neighbor == v) return buf[i].edge;
  }
  return std::nullopt;
}

Parity LadderGraph::parity(VertexId v) const {
  const auto [level, site] = vertex(v);
  return ((level + site_parity_[site]) % 2 == 0) ? Parity::Even : Parity::Odd;
}

ParityClasses LadderGraph::parity_classes() const {
  if (!depth_) throw std::logic_error("parity_classes needs a bounded ladder");
  return parity_classes_through(*depth_);
}

ParityClasses LadderGraph::parity_classes_through(int level) const {
  ParityClasses classes;
  const std::size_t n = vertex_count_through(level);
  for (std::size_t v = 0; v < n; ++v) {
    const auto id = static_cast<VertexId>(v);
    (parity(id) == Parity::Even ? classes.even : classes.odd).push_back(id);
  }
  return classes;
}

}  // namespace errw
