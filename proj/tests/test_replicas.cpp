#include <doctest.h>

#include <algorithm>

#include "errw/replicas.hpp"

using namespace errw;

TEST_CASE("seed derivation") {
  CHECK(derive_replica_seed(42, 7) == derive_replica_seed(42, 7));
  CHECK(derive_replica_seed(42, 7) != derive_replica_seed(43, 7));
  // SplitMix64 reference output for state 0x9E3779B97F4A7C15.
  CHECK(splitmix64_mix(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  std::vector<std::uint64_t> seeds;
  seeds.reserve(1'000'001);
  for (std::uint64_t i = 0; i <= 1'000'000; ++i) seeds.push_back(derive_replica_seed(1, i));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("uniform conversion") {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == static_cast<double>(b.next() >> 11) / 9007199254740992.0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(1);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(7) < 7);
}

TEST_CASE("parallel replicas equal the serial reference") {
  const LadderGraph g(tree_preset("segment-2"), 30);
  ReplicaPlan plan;
  plan.a = 2.0;
  plan.horizon = 5000;
  plan.master_seed = 123;
  plan.checkpoints = {10, 100, 1000, 5000};
  plan.keep_counts = true;
  const auto serial = run_replicas_serial(g, plan, 64);
  for (int threads : {1, 2, 3, 8}) CHECK(run_replicas(g, plan, 64, threads) == serial);
  // Any subrange reproduces the same replicas.
  const auto tail = run_replicas(g, plan, 14, 2, 50);
  CHECK(std::equal(tail.begin(), tail.end(), serial.begin() + 50));
  for (const auto& r : serial) {
    CHECK(r.counts.total == plan.horizon);
    CHECK(r.checkpoints.size() == plan.checkpoints.size());
    CHECK(r.checkpoints.back().vertex == r.final_vertex);
    CHECK(r.checkpoints.back().max_level == r.max_level);
  }
}

TEST_CASE("bad plans are rejected") {
  const LadderGraph g(tree_preset("segment-2"), 3);
  ReplicaPlan plan;
  plan.horizon = 10;
  plan.checkpoints = {5, 3};
  CHECK_THROWS_AS(run_replicas(g, plan, 2), std::invalid_argument);
  plan.checkpoints = {20};
  CHECK_THROWS_AS(run_replicas_serial(g, plan, 2), std::invalid_argument);
  plan.checkpoints.clear();
  plan.a = -1;
  CHECK_THROWS_AS(run_replicas(g, plan, 2), std::invalid_argument);
}
