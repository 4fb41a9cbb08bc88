#pragma once

#include <cstdint>
#include <vector>

#include "errw/ladder.hpp"
#include "errw/walk.hpp"

namespace errw {

/// What every replica of a batch does: `horizon` reinforced steps from the
/// origin, recording positions at `checkpoints` (sorted, <= horizon).
struct ReplicaPlan {
  double a = 1.0;
  std::uint64_t horizon = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> checkpoints;
  bool keep_counts = false;
};

struct ReplicaSummary {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  VertexId final_vertex = 0;
  int final_level = 0;
  int max_level = 0;
  std::vector<CheckpointRecorder::Sample> checkpoints;
  EdgeCounts counts;  ///< filled when ReplicaPlan::keep_counts

  bool operator==(const ReplicaSummary&) const = default;
};

ReplicaSummary run_replica(const LadderGraph& ladder, const ReplicaPlan& plan, std::uint64_t index);

/// Reference implementation: replicas first..first+count-1 in order.
std::vector<ReplicaSummary> run_replicas_serial(const LadderGraph& ladder, const ReplicaPlan& plan,
                                                std::uint64_t count, std::uint64_t first = 0);

/// OpenMP version. Each replica owns its seed and its output slot, so the
/// result is identical to the serial one for every thread count.
/// threads <= 0 uses the OpenMP default.
std::vector<ReplicaSummary> run_replicas(const LadderGraph& ladder, const ReplicaPlan& plan,
                                         std::uint64_t count, int threads = 0,
                                         std::uint64_t first = 0);

}  // namespace errw
