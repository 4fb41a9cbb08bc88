#include "errw/replicas.hpp"

#include <stdexcept>

#include <omp.h>

namespace errw {

ReplicaSummary run_replica(const LadderGraph& ladder, const ReplicaPlan& plan, std::uint64_t index) {
  ReplicaSummary out;
  out.index = index;
  out.seed = derive_replica_seed(plan.master_seed, index);
  out.horizon = plan.horizon;
  Rng rng(out.seed);
  ReinforcementState state(ladder, plan.a, ladder.start());
  LevelTracker levels(state);
  RunOptions opts;
  opts.keep_path = false;
  if (plan.checkpoints.empty()) {
    run(state, plan.horizon, rng, opts, levels);
  } else {
    CheckpointRecorder recorder(state, plan.checkpoints);
    run(state, plan.horizon, rng, opts, levels, recorder);
    out.checkpoints = recorder.samples();
  }
  out.final_vertex = state.position();
  out.final_level = levels.final_level();
  out.max_level = levels.max_level();
  if (plan.keep_counts) out.counts = state.counts();
  return out;
}

namespace {

void check_plan(const ReplicaPlan& plan) {
  if (!(plan.a > 0.0)) throw std::invalid_argument("replica plan needs a > 0");
  std::uint64_t prev = 0;
  for (auto t : plan.checkpoints) {
    if (t < prev || t > plan.horizon) {
      throw std::invalid_argument("checkpoints must be sorted and within the horizon");
    }
    prev = t;
  }
}

}  // namespace

std::vector<ReplicaSummary> run_replicas_serial(const LadderGraph& ladder, const ReplicaPlan& plan,
                                                std::uint64_t count, std::uint64_t first) {
  check_plan(plan);
  std::vector<ReplicaSummary> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(run_replica(ladder, plan, first + i));
  return out;
}

std::vector<ReplicaSummary> run_replicas(const LadderGraph& ladder, const ReplicaPlan& plan,
                                         std::uint64_t count, int threads, std::uint64_t first) {
  check_plan(plan);
  std::vector<ReplicaSummary> out(count);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const auto n = static_cast<std::int64_t>(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = run_replica(ladder, plan, first + static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(errw_replica_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace errw
