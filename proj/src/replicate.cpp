#include "carma_hawkes/replicate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

namespace carma_hawkes {

std::size_t default_thread_count() {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv(kThreadsEnv)) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
        } catch (const std::exception&) {
            // ignored: malformed values leave the default in place
        }
    }
    return n;
}

EventLog simulate(const Model& model, double horizon, std::uint64_t seed, SimulationOptions options) {
    RngStream rng(seed);
    if (const auto* u = std::get_if<UnivariateModel>(&model)) {
        return simulate_univariate(*u, horizon, rng, options);
    }
    return simulate_bivariate(std::get<BivariateModel>(model), horizon, rng, options);
}

std::vector<EventLog> simulate_replications(const Model& model, double horizon, std::uint64_t seed,
                                            std::size_t replications, std::size_t threads,
                                            SimulationOptions options) {
    std::vector<EventLog> logs(replications);
    std::vector<std::exception_ptr> errors(replications);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < replications; k = next.fetch_add(1)) {
            try {
                logs[k] = simulate(model, horizon, seed + k, options);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(replications, 1));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }

    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return logs;
}

}  // namespace carma_hawkes
