#pragma once

// Independent replications on a worker pool. Replication k always uses
// RngStream(seed + k), so results do not depend on scheduling or on the
// number of workers.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "carma_hawkes/model.hpp"
#include "carma_hawkes/thinning.hpp"

namespace carma_hawkes {

// Environment variable capping the worker pool.
inline constexpr const char* kThreadsEnv = "CARMA_HAWKES_THREADS";

// hardware_concurrency(), capped by CARMA_HAWKES_THREADS when it is set to a
// positive integer.
std::size_t default_thread_count();

// One run of whichever algorithm matches the model.
EventLog simulate(const Model& model, double horizon, std::uint64_t seed, SimulationOptions options = {});

// Runs `replications` paths with seeds seed, seed + 1, ...; rethrows the
// first failure in replication order.
std::vector<EventLog> simulate_replications(const Model& model, double horizon, std::uint64_t seed,
                                            std::size_t replications, std::size_t threads,
                                            SimulationOptions options = {});

}  // namespace carma_hawkes
