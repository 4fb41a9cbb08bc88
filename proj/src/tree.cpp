#include "errw/tree.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace errw {

FiniteTree::FiniteTree(std::vector<long> labels, std::vector<std::pair<long, long>> edges)
    : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw std::invalid_argument("tree needs at least 2 vertices");
  }
  std::map<long, int> index;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index.emplace(labels_[i], static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate vertex label " + std::to_string(labels_[i]));
    }
  }
  if (edges.size() != labels_.size() - 1) {
    throw std::invalid_argument("a tree on " + std::to_string(labels_.size()) +
                                " vertices needs " + std::to_string(labels_.size() - 1) +
                                " edges, got " + std::to_string(edges.size()));
  }
  adjacency_.resize(labels_.size());
  for (const auto& [a, b] : edges) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw std::invalid_argument("edge references unknown vertex");
    }
    if (ia->second == ib->second) {
      throw std::invalid_argument("self-loop at vertex " + std::to_string(a));
    }
    const int e = static_cast<int>(edges_.size());
    edges_.emplace_back(ia->second, ib->second);
    adjacency_[ia->second].push_back({e, ib->second});
    adjacency_[ib->second].push_back({e, ia->second});
  }
  // |E| = |V| - 1 plus connectivity rules out cycles.
  std::vector<char> seen(labels_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& inc : adjacency_[v]) {
      if (!seen[inc.neighbor]) {
        seen[inc.neighbor] = 1;
        ++reached;
        stack.push_back(inc.neighbor);
      }
    }
  }
  if (reached != labels_.size()) {
    throw std::invalid_argument("edge set is not connected (or contains a cycle)");
  }
}

int FiniteTree::index_of(long label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw std::invalid_argument("unknown tree vertex " + std::to_string(label));
  }
  return static_cast<int>(it - labels_.begin());
}

int FiniteTree::max_degree() const {
  std::size_t d = 0;
  for (const auto& adj : adjacency_) d = std::max(d, adj.size());
  return static_cast<int>(d);
}

int FiniteTree::distance(int from, int to) const {
  std::vector<int> dist(labels_.size(), -1);
  std::queue<int> q;
  dist.at(from) = 0;
  q.push(from);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    if (v == to) return dist[v];
    for (const auto& inc : adjacency_[v]) {
      if (dist[inc.neighbor] < 0) {
        dist[inc.neighbor] = dist[v] + 1;
        q.push(inc.neighbor);
      }
    }
  }
  return dist.at(to);
}

FiniteTree tree_preset(std::string_view name) {
  const auto dash = name.rfind('-');
  if (dash == std::string_view::npos) {
    throw std::invalid_argument("unknown tree preset '" + std::string(name) + "'");
  }
  const auto kind = name.substr(0, dash);
  const auto digits = name.substr(dash + 1);
  long k = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || k < 1) {
    throw std::invalid_argument("bad preset size in '" + std::string(name) + "'");
  }
  std::vector<long> labels;
  std::vector<std::pair<long, long>> edges;
  if (kind == "segment") {
    for (long i = 1; i <= k; ++i) labels.push_back(i);
    for (long i = 1; i < k; ++i) edges.emplace_back(i, i + 1);
  } else if (kind == "path") {
    for (long i = 0; i <= k; ++i) labels.push_back(i);
    for (long i = 0; i < k; ++i) edges.emplace_back(i, i + 1);
  } else if (kind == "star") {
    for (long i = 0; i <= k; ++i) labels.push_back(i);
    for (long i = 1; i <= k; ++i) edges.emplace_back(0, i);
  } else {
    throw std::invalid_argument("unknown tree preset '" + std::string(name) + "'");
  }
  return FiniteTree(std::move(labels), std::move(edges));
}

FiniteTree tree_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("tree JSON: ") + e.what());
  }
  if (!j.contains("vertices") || !j.contains("edges")) {
    throw std::invalid_argument("tree JSON needs 'vertices' and 'edges'");
  }
  std::vector<long> labels = j.at("vertices").get<std::vector<long>>();
  std::vector<std::pair<long, long>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) {
      throw std::invalid_argument("tree JSON: each edge must be a pair");
    }
    edges.emplace_back(e[0].get<long>(), e[1].get<long>());
  }
  return FiniteTree(std::move(labels), std::move(edges));
}

FiniteTree tree_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tree file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return tree_from_json_text(ss.str());
}

std::string tree_to_json_text(const FiniteTree& tree) {
  nlohmann::json j;
  j["vertices"] = tree.labels();
  auto edges = nlohmann::json::array();
  for (const auto& [a, b] : tree.edges()) {
    edges.push_back({tree.label(a), tree.label(b)});
  }
  j["edges"] = edges;
  return j.dump();
}

}  // namespace errw
