#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errw/ladder.hpp"
#include "errw/rng.hpp"

namespace errw {

/// A finite trajectory X_0, ..., X_T.
struct PathRecord {
  std::vector<VertexId> vertices;

  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  VertexId front() const { return vertices.front(); }
  VertexId back() const { return vertices.back(); }
  bool operator==(const PathRecord&) const = default;
};

/// Undirected traversal counts k_t(e), dense by edge id.
struct EdgeCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(EdgeId e) const { return e < counts.size() ? counts[e] : 0; }
  bool operator==(const EdgeCounts&) const = default;
};

/// Returns a warning when `a` is at or below the known recurrence threshold
/// (3/4 for the two-vertex tree). For larger trees the threshold is not known
/// here and no warning is produced.
std::optional<std::string> a_min_warning(const FiniteTree& tree, double a);

/// Time-t state of a linearly edge-reinforced walk: w_t(e) = a + counts(e).
///
/// The referenced ladder must outlive the state. A state is single-threaded.
/// On unbounded ladders the count storage covers a prefix of levels and
/// doubles whenever the walker reaches its frontier.
class ReinforcementState {
 public:
  ReinforcementState(const LadderGraph& ladder, double a, VertexId start,
                     const EdgeCounts* initial_counts = nullptr);

  const LadderGraph& ladder() const { return *ladder_; }
  double a() const { return a_; }
  VertexId position() const { return position_; }
  std::uint64_t time() const { return time_; }
  int materialized_levels() const { return materialized_; }

  std::uint64_t count(EdgeId e) const { return e < counts_.size() ? counts_[e] : 0; }
  double weight(EdgeId e) const { return a_ + static_cast<double>(count(e)); }
  std::span<const std::uint64_t> raw_counts() const { return counts_; }
  /// Counts accrued in this run plus the initial counts; total = sum.
  EdgeCounts counts() const;
  /// Sum of w_t(e) over the materialized edges.
  double total_weight() const;

  /// One reinforced step; returns the new position.
  VertexId step(Rng& rng);
  EdgeId last_edge() const { return last_edge_; }

 private:
  void grow_to(int level);

  const LadderGraph* ladder_;
  double a_;
  std::vector<std::uint64_t> counts_;
  VertexId position_;
  std::uint64_t time_ = 0;
  int materialized_ = 0;
  EdgeId last_edge_ = 0;
  std::vector<Incidence> scratch_;
};

/// init_walk: validates a > 0 and the start vertex, logs the a_min warning to
/// std::clog. `start` defaults to the ladder origin.
ReinforcementState init_walk(const LadderGraph& ladder, double a,
                             std::optional<VertexId> start = {},
                             const EdgeCounts* initial_counts = nullptr);

inline VertexId step(ReinforcementState& state, Rng& rng) { return state.step(rng); }

// ---------------------------------------------------------------------------
// Observers. Anything with on_step(state, from, edge) can be passed to run().

/// Running maximum and current level.
class LevelTracker {
 public:
  explicit LevelTracker(const ReinforcementState& state)
      : sites_(static_cast<VertexId>(state.ladder().sites())),
        max_level_(static_cast<int>(state.position() / sites_)),
        final_level_(max_level_) {}

  void on_step(const ReinforcementState& s, VertexId, EdgeId) {
    final_level_ = static_cast<int>(s.position() / sites_);
    if (final_level_ > max_level_) max_level_ = final_level_;
  }

  int max_level() const { return max_level_; }
  int final_level() const { return final_level_; }

 private:
  VertexId sites_;
  int max_level_;
  int final_level_;
};

/// Position and running maximum level at selected times.
class CheckpointRecorder {
 public:
  struct Sample {
    std::uint64_t time;
    VertexId vertex;
    int max_level;
    bool operator==(const Sample&) const = default;
  };

  /// `times` must be sorted; time 0 is recorded at construction.
  CheckpointRecorder(const ReinforcementState& state, std::vector<std::uint64_t> times);

  void on_step(const ReinforcementState& s, VertexId, EdgeId) {
    const int level = static_cast<int>(s.position() / sites_);
    if (level > max_level_) max_level_ = level;
    while (next_ < times_.size() && times_[next_] == s.time()) {
      samples_.push_back({s.time(), s.position(), max_level_});
      ++next_;
    }
  }

  const std::vector<Sample>& samples() const { return samples_; }

 private:
  std::vector<std::uint64_t> times_;
  std::size_t next_ = 0;
  VertexId sites_;
  int max_level_;
  std::vector<Sample> samples_;
};

struct RunOptions {
  /// Keep the whole trajectory. Unset means: keep it only for runs shorter
  /// than kStreamingThreshold steps.
  std::optional<bool> keep_path;
  static constexpr std::uint64_t kStreamingThreshold = 100000;
};

struct RunResult {
  std::optional<PathRecord> path;
  std::uint64_t steps = 0;
};

class ObserverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies `steps` reinforced steps, calling every observer after each one.
template <class... Observers>
RunResult run(ReinforcementState& state, std::uint64_t steps, Rng& rng, const RunOptions& options,
              Observers&... observers) {
  RunResult result;
  const bool keep = options.keep_path.value_or(steps < RunOptions::kStreamingThreshold);
  if (keep) {
    result.path.emplace();
    result.path->vertices.reserve(steps + 1);
    result.path->vertices.push_back(state.position());
  }
  for (std::uint64_t i = 0; i < steps; ++i) {
    const VertexId from = state.position();
    state.step(rng);
    if (keep) result.path->vertices.push_back(state.position());
    if constexpr (sizeof...(Observers) > 0) {
      try {
        (observers.on_step(state, from, state.last_edge()), ...);
      } catch (const std::exception& e) {
        throw ObserverError("observer failed at time " + std::to_string(state.time()) +
                            " (position " + std::to_string(state.position()) + "): " + e.what());
      }
    }
  }
  result.steps = steps;
  return result;
}

using StepCallback = std::function<void(const ReinforcementState&, VertexId, EdgeId)>;

/// Type-erased variant of run() taking a list of callbacks.
RunResult run_with_callbacks(ReinforcementState& state, std::uint64_t steps, Rng& rng,
                             const RunOptions& options, std::span<const StepCallback> callbacks);

}  // namespace errw
