#include "errw/exact.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace errw {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.empty()) throw std::invalid_argument("empty rational");
  try {
    if (const auto dot = s.find('.'); dot != std::string::npos) {
      if (s.find('/') != std::string::npos || s.find('e') != std::string::npos ||
          s.find('E') != std::string::npos) {
        throw std::invalid_argument("bad rational '" + s + "'");
      }
      const std::string frac = s.substr(dot + 1);
      std::string digits = s.substr(0, dot) + frac;
      if (digits.empty() || digits == "-" || digits == "+") {
        throw std::invalid_argument("bad rational '" + s + "'");
      }
      if (digits.front() == '+') digits.erase(digits.begin());
      mpz_class num(digits, 10);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
      Rational q(num, den);
      q.canonicalize();
      return q;
    }
    if (s.front() == '+') s.erase(s.begin());
    Rational q(s, 10);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad rational '" + std::string(text) + "'");
  }
}

std::string to_string(const Rational& q) { return q.get_str(); }

void validate_path(const LadderGraph& ladder, const PathRecord& path) {
  if (path.vertices.empty()) throw std::invalid_argument("path has no start vertex");
  for (VertexId v : path.vertices) {
    if (!ladder.contains_vertex(v)) {
      throw std::invalid_argument("path visits unknown vertex " + std::to_string(v));
    }
  }
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    if (!ladder.edge_between(path.vertices[i - 1], path.vertices[i])) {
      throw std::invalid_argument("path step " + std::to_string(i) + " joins non-adjacent vertices " +
                                  std::to_string(path.vertices[i - 1]) + " and " +
                                  std::to_string(path.vertices[i]));
    }
  }
}

EdgeCounts crossing_counts(const LadderGraph& ladder, const PathRecord& path) {
  EdgeCounts out;
  if (ladder.bounded()) out.counts.assign(ladder.edge_count(), 0);
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const auto e = ladder.edge_between(path.vertices[i - 1], path.vertices[i]);
    if (!e) throw std::invalid_argument("path joins non-adjacent vertices");
    if (*e >= out.counts.size()) out.counts.resize(*e + 1, 0);
    ++out.counts[*e];
    ++out.total;
  }
  return out;
}

Rational path_probability_exact(const LadderGraph& ladder, const Rational& a,
                                const PathRecord& path, const EdgeCounts* initial_counts) {
  if (sgn(a) <= 0) throw std::invalid_argument("initial weight a must be positive");
  validate_path(ladder, path);
  std::map<EdgeId, std::uint64_t> extra;
  if (initial_counts) {
    for (std::size_t e = 0; e < initial_counts->counts.size(); ++e) {
      if (initial_counts->counts[e] != 0) extra[static_cast<EdgeId>(e)] = initial_counts->counts[e];
    }
  }
  auto weight = [&](EdgeId e) {
    auto it = extra.find(e);
    return it == extra.end() ? a : Rational(a + Rational(it->second));
  };
  std::vector<Incidence> buf(ladder.max_degree());
  Rational p(1);
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    const VertexId from = path.vertices[i - 1];
    const int k = ladder.incident(from, buf.data());
    Rational total(0);
    Rational chosen(0);
    EdgeId chosen_edge = 0;
    for (int j = 0; j < k; ++j) {
      const Rational w = weight(buf[j].edge);
      total += w;
      if (buf[j].neighbor == path.vertices[i]) {
        chosen = w;
        chosen_edge = buf[j].edge;
      }
    }
    p *= chosen / total;
    ++extra[chosen_edge];
  }
  p.canonicalize();
  return p;
}

std::vector<PathRecord> enumerate_paths(const LadderGraph& ladder, VertexId start, int length,
                                        std::size_t max_paths) {
  if (length < 0) throw std::invalid_argument("path length must be >= 0");
  std::vector<PathRecord> out;
  PathRecord current{{start}};
  auto recurse = [&](auto&& self) -> void {
    if (static_cast<int>(current.length()) == length) {
      if (out.size() >= max_paths) {
        throw std::length_error("path enumeration exceeds the cap of " +
                                std::to_string(max_paths) + " paths");
      }
      out.push_back(current);
      return;
    }
    std::vector<Incidence> local(ladder.max_degree());
    const int k = ladder.incident(current.back(), local.data());
    for (int j = 0; j < k; ++j) {
      current.vertices.push_back(local[j].neighbor);
      self(self);
      current.vertices.pop_back();
    }
  };
  recurse(recurse);
  return out;
}

ExchangeabilityReport exchangeability_check(const LadderGraph& ladder, const Rational& a,
                                            int length, std::size_t max_paths) {
  if (!ladder.bounded()) throw std::invalid_argument("exchangeability check needs a bounded ladder");
  ExchangeabilityReport report;
  report.length = length;
  const auto paths = enumerate_paths(ladder, ladder.start(), length, max_paths);
  report.paths = paths.size();

  struct Group {
    Rational probability;
    std::size_t size = 0;
    bool violated = false;
  };
  std::map<std::pair<std::vector<std::uint64_t>, VertexId>, Group> groups;
  for (const auto& path : paths) {
    auto key = std::make_pair(crossing_counts(ladder, path).counts, path.back());
    const Rational p = path_probability_exact(ladder, a, path);
    auto [it, inserted] = groups.try_emplace(std::move(key));
    Group& g = it->second;
    if (inserted) {
      g.probability = p;
    } else if (g.probability != p && !g.violated) {
      g.violated = true;
      report.violations.push_back({it->first.second, it->first.first, g.probability, p});
    }
    ++g.size;
  }
  report.groups = groups.size();
  for (const auto& [key, g] : groups) report.largest_group = std::max(report.largest_group, g.size);
  return report;
}

}  // namespace errw
