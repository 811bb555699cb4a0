#pragma once

// Thinning simulation of univariate and bivariate CARMA(p,q)-Hawkes paths.
//
// Candidates are drawn from a homogeneous stream whose rate is the current
// value of the dominating envelope
//     lbar_t = base + sum_{T_i < t} K_{mark_i} exp(decay (t - T_i)),
// which is non-increasing between events when decay < 0. A candidate at t is
// kept with probability lambda_t / lbar (split by mark for the bivariate
// case). The envelope is only bumped at accepted events.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "carma_hawkes/model.hpp"
#include "carma_hawkes/rng.hpp"

namespace carma_hawkes {

// Recursive form of the envelope: value at anchor_time plus exponential
// relaxation towards base.
class BoundTracker {
public:
    BoundTracker(double base, double decay, std::vector<double> jump_for_mark);
    static BoundTracker for_process(const ModalProcess& process);

    double lambda_bar() const { return lambda_bar_; }
    double anchor_time() const { return anchor_; }
    double base() const { return base_; }
    double decay() const { return decay_; }
    // K for mark in {1, 2, ...}.
    double jump(int mark) const { return jump_[static_cast<std::size_t>(mark - 1)]; }

    double value(double t) const { return base_ + std::exp(decay_ * (t - anchor_)) * (lambda_bar_ - base_); }

    // Relax to event_time, then add the mark's increment.
    void on_event(double event_time, int mark);

private:
    double lambda_bar_;
    double anchor_ = 0.0;
    double base_;
    double decay_;
    std::vector<double> jump_;
};

BoundTracker bound_after_event(BoundTracker tracker, double event_time, int mark);
double bound_value(const BoundTracker& tracker, double t);

struct RunMetadata {
    std::uint64_t seed = 0;
    double horizon = 0.0;
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
    double wall_time_seconds = 0.0;
    std::uint64_t spec_hash = 0;
    int components = 1;

    // accepted / proposed; 1 when nothing was proposed.
    double acceptance_ratio() const;
};

struct EventLog {
    std::vector<double> times;  // strictly increasing, within [0, horizon]
    std::vector<int> marks;     // 1 or 2
    RunMetadata meta;

    std::size_t size() const { return times.size(); }
    std::size_t count(int mark) const;
};

struct SimulationOptions {
    // Simulate specs that failed validation (non-stationary branching or a
    // negative kernel). A non-negative decay rate is always refused because
    // the envelope would grow between events.
    bool override_validation = false;
};

// Absolute slack allowed when checking lambda_t <= lbar_t.
inline constexpr double kBoundSlack = 1e-9;

namespace detail {

// Everything in the thinning loop except the uniform draws.
class ThinningEngine {
public:
    ThinningEngine(const ModalProcess& process, const ValidationReport& report, double horizon,
                   SimulationOptions options, std::uint64_t spec_hash);

    double time() const { return t_; }
    double horizon() const { return horizon_; }

    // Records the first event if t <= horizon.
    bool start(double t, int mark);
    // Envelope value at the current time; the rate of the next candidate gap.
    double dominating_rate() const { return tracker_.value(t_); }
    // Evaluates the candidate at t against u * rate; returns the accepted
    // mark or 0. Throws BoundViolation.
    int decide(double t, double rate, double u);

    EventLog finish(std::uint64_t seed);

private:
    const ModalProcess& process_;
    double horizon_;
    bool enforce_floor_;
    ProcessState state_;
    BoundTracker tracker_;
    Eigen::VectorXcd decayed_;
    std::vector<double> lambda_;
    double t_ = 0.0;
    EventLog log_;
    std::chrono::steady_clock::time_point started_;
};

template <UniformSource U>
std::uint64_t seed_of(const U& rng) {
    if constexpr (requires { rng.seed(); }) {
        return rng.seed();
    } else {
        return 0;
    }
}

template <UniformSource U>
void run_loop(ThinningEngine& engine, U& rng) {
    for (;;) {
        const double rate = engine.dominating_rate();
        const double t = engine.time() - std::log(rng.next()) / rate;
        if (t > engine.horizon()) {
            return;
        }
        engine.decide(t, rate, rng.next());
    }
}

}  // namespace detail

// Throws HorizonNonPositive, NonStationarySpec, BoundViolation.
template <UniformSource U>
EventLog simulate_univariate(const UnivariateModel& model, double horizon, U& rng, SimulationOptions options = {}) {
    detail::ThinningEngine engine(model.process(), model.validation(), horizon, options, model.hash());
    const double first = -std::log(rng.next()) / model.spec().mu;
    if (engine.start(first, 1)) {
        detail::run_loop(engine, rng);
    }
    return engine.finish(detail::seed_of(rng));
}

template <UniformSource U>
EventLog simulate_bivariate(const BivariateModel& model, double horizon, U& rng, SimulationOptions options = {}) {
    detail::ThinningEngine engine(model.process(), model.validation(), horizon, options, model.hash());
    const double u1 = rng.next();
    const double u2 = rng.next();
    const double first_plus = -std::log(u1) / model.spec().mu[0];
    const double first_minus = -std::log(u2) / model.spec().mu[1];
    // Ties go to mark 1.
    const bool plus = first_plus <= first_minus;
    if (engine.start(plus ? first_plus : first_minus, plus ? 1 : 2)) {
        detail::run_loop(engine, rng);
    }
    return engine.finish(detail::seed_of(rng));
}

// Intensity and envelope along a simulated path, reconstructed by replaying
// the log. Sample times must be sorted; each sample sees only events strictly
// before it.
struct IntensitySample {
    double t = 0.0;
    std::array<double, 2> lambda{};  // second entry unused for univariate
    double lambda_sum = 0.0;
    double lambda_bar = 0.0;
};

std::vector<IntensitySample> trace_path(const ModalProcess& process, const EventLog& log,
                                        std::span<const double> times);

// 0, dt, 2 dt, ... up to horizon.
std::vector<double> uniform_grid(double horizon, double dt);

}  // namespace carma_hawkes
