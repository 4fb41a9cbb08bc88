#include "errw/walk.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace errw {

std::optional<std::string> a_min_warning(const FiniteTree& tree, double a) {
  if (tree.vertex_count() == 2 && a <= 0.75) {
    return "initial weight a = " + std::to_string(a) +
           " is at or below 3/4; localization and recurrence results for the two-vertex "
           "ladder assume a > 3/4";
  }
  return std::nullopt;
}

ReinforcementState::ReinforcementState(const LadderGraph& ladder, double a, VertexId start,
                                       const EdgeCounts* initial_counts)
    : ladder_(&ladder), a_(a), position_(start), scratch_(ladder.max_degree()) {
  if (!(a > 0.0)) throw std::invalid_argument("initial weight a must be positive");
  if (ladder.max_degree() > 16) {
    throw std::invalid_argument("tree degree too large for the sampler (max 14)");
  }
  if (!ladder.contains_vertex(start)) {
    throw std::invalid_argument("start vertex " + std::to_string(start) + " is not in the ladder");
  }
  if (ladder.bounded()) {
    materialized_ = *ladder.depth();
    counts_.assign(ladder.edge_count(), 0);
  } else {
    materialized_ = 0;
    grow_to(std::max(3, ladder.vertex_level(start) + 1));
  }
  if (initial_counts) {
    const auto& init = initial_counts->counts;
    for (std::size_t e = 0; e < init.size(); ++e) {
      if (init[e] == 0) continue;
      if (!ladder.contains_edge(static_cast<EdgeId>(e))) {
        throw std::invalid_argument("initial counts reference edge " + std::to_string(e) +
                                    " outside the ladder");
      }
      if (e >= counts_.size()) grow_to(ladder.edge_level(static_cast<EdgeId>(e)) + 1);
      counts_[e] = init[e];
    }
  }
}

void ReinforcementState::grow_to(int level) {
  if (level <= materialized_ && !counts_.empty()) return;
  int target = std::max(1, materialized_);
  while (target < level) target *= 2;
  materialized_ = target;
  // Edges among levels 0..target plus the horizontals leaving level target.
  counts_.resize(ladder_->edge_count_through(target + 1), 0);
}

EdgeCounts ReinforcementState::counts() const {
  EdgeCounts out;
  out.counts = counts_;
  out.total = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  return out;
}

double ReinforcementState::total_weight() const {
  const std::size_t edges = ladder_->bounded() ? ladder_->edge_count()
                                               : ladder_->edge_count_through(materialized_);
  double total = a_ * static_cast<double>(edges);
  for (std::size_t e = 0; e < edges; ++e) total += static_cast<double>(counts_[e]);
  return total;
}

VertexId ReinforcementState::step(Rng& rng) {
  const Incidence* inc;
  int degree;
  if (ladder_->bounded()) {
    const auto span = ladder_->neighbors(position_);
    inc = span.data();
    degree = static_cast<int>(span.size());
  } else {
    const int level = ladder_->vertex_level(position_);
    if (level >= materialized_) grow_to(level + 1);
    degree = ladder_->incident(position_, scratch_.data());
    inc = scratch_.data();
  }
  // Cumulative weights in canonical incident-edge order, one uniform draw.
  double cumulative[16];
  double total = 0.0;
  for (int j = 0; j < degree; ++j) {
    total += a_ + static_cast<double>(counts_[inc[j].edge]);
    cumulative[j] = total;
  }
  const double u = rng.uniform() * total;
  int chosen = 0;
  while (chosen < degree - 1 && cumulative[chosen] <= u) ++chosen;
  last_edge_ = inc[chosen].edge;
  ++counts_[last_edge_];
  position_ = inc[chosen].neighbor;
  ++time_;
  return position_;
}

ReinforcementState init_walk(const LadderGraph& ladder, double a, std::optional<VertexId> start,
                             const EdgeCounts* initial_counts) {
  if (auto warning = a_min_warning(ladder.tree(), a)) {
    std::clog << "warning: " << *warning << '\n';
  }
  return ReinforcementState(ladder, a, start.value_or(ladder.start()), initial_counts);
}

CheckpointRecorder::CheckpointRecorder(const ReinforcementState& state,
                                       std::vector<std::uint64_t> times)
    : times_(std::move(times)), sites_(static_cast<VertexId>(state.ladder().sites())) {
  if (!std::is_sorted(times_.begin(), times_.end())) {
    throw std::invalid_argument("checkpoint times must be sorted");
  }
  max_level_ = static_cast<int>(state.position() / sites_);
  while (next_ < times_.size() && times_[next_] <= state.time()) {
    if (times_[next_] == state.time()) samples_.push_back({state.time(), state.position(), max_level_});
    ++next_;
  }
}

RunResult run_with_callbacks(ReinforcementState& state, std::uint64_t steps, Rng& rng,
                             const RunOptions& options, std::span<const StepCallback> callbacks) {
  struct Adapter {
    std::span<const StepCallback> callbacks;
    void on_step(const ReinforcementState& s, VertexId from, EdgeId e) {
      for (const auto& cb : callbacks) cb(s, from, e);
    }
  } adapter{callbacks};
  return run(state, steps, rng, options, adapter);
}

}  // namespace errw
