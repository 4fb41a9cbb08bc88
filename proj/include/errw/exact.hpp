#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "errw/ladder.hpp"
#include "errw/walk.hpp"

namespace errw {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a finite decimal ("0.76") exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

/// Throws std::invalid_argument unless consecutive vertices are adjacent.
void validate_path(const LadderGraph& ladder, const PathRecord& path);

/// Undirected crossing counts of a path; total equals the path length.
EdgeCounts crossing_counts(const LadderGraph& ladder, const PathRecord& path);

/// Probability that the reinforced walk started at path.front() with weights
/// a + initial_counts follows `path`: the product over steps of
/// w_t({X_t, X_{t+1}}) / sum_{e at X_t} w_t(e), in exact rationals.
Rational path_probability_exact(const LadderGraph& ladder, const Rational& a,
                                const PathRecord& path, const EdgeCounts* initial_counts = nullptr);

/// All paths with exactly `length` steps from `start`, depth-first in
/// canonical incident order. Throws std::length_error beyond `max_paths`.
std::vector<PathRecord> enumerate_paths(const LadderGraph& ladder, VertexId start, int length,
                                        std::size_t max_paths);

struct ExchangeabilityViolation {
  VertexId endpoint;
  std::vector<std::uint64_t> counts;
  Rational first;
  Rational other;
};

struct ExchangeabilityReport {
  int length = 0;
  std::size_t paths = 0;
  std::size_t groups = 0;
  std::size_t largest_group = 0;
  std::vector<ExchangeabilityViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Groups every path of the given length from the origin by (crossing counts,
/// endpoint) and checks that each group shares one exact probability.
ExchangeabilityReport exchangeability_check(const LadderGraph& ladder, const Rational& a,
                                            int length, std::size_t max_paths = 5'000'000);

}  // namespace errw
