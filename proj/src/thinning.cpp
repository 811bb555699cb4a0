#include "carma_hawkes/thinning.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "carma_hawkes/errors.hpp"

namespace carma_hawkes {

ScriptedUniforms::ScriptedUniforms(std::vector<double> values) : values_(std::move(values)) {
    for (double u : values_) {
        if (!(u > 0.0 && u < 1.0)) {
            throw std::invalid_argument("scripted uniforms must lie in (0, 1)");
        }
    }
}

double ScriptedUniforms::next() {
    if (pos_ >= values_.size()) {
        throw std::out_of_range("scripted uniform sequence exhausted");
    }
    return values_[pos_++];
}

BoundTracker::BoundTracker(double base, double decay, std::vector<double> jump_for_mark)
    : lambda_bar_(base), base_(base), decay_(decay), jump_(std::move(jump_for_mark)) {}

BoundTracker BoundTracker::for_process(const ModalProcess& process) {
    return BoundTracker(process.base(), process.decay(), process.bound_jumps());
}

void BoundTracker::on_event(double event_time, int mark) {
    lambda_bar_ = value(event_time) + jump(mark);
    anchor_ = event_time;
}

BoundTracker bound_after_event(BoundTracker tracker, double event_time, int mark) {
    tracker.on_event(event_time, mark);
    return tracker;
}

double bound_value(const BoundTracker& tracker, double t) {
    return tracker.value(t);
}

double RunMetadata::acceptance_ratio() const {
    if (proposed == 0) return 1.0;
    return static_cast<double>(accepted) / static_cast<double>(proposed);
}

std::size_t EventLog::count(int mark) const {
    return static_cast<std::size_t>(std::count(marks.begin(), marks.end(), mark));
}

namespace detail {

ThinningEngine::ThinningEngine(const ModalProcess& process, const ValidationReport& report, double horizon,
                               SimulationOptions options, std::uint64_t spec_hash)
    : process_(process),
      horizon_(horizon),
      enforce_floor_(report.admissible()),
      state_(process.initial_state()),
      tracker_(BoundTracker::for_process(process)),
      decayed_(process.modes()),
      lambda_(process.channels(), 0.0),
      started_(std::chrono::steady_clock::now()) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw HorizonNonPositive("horizon must be positive and finite");
    }
    if (!(process.decay() < 0.0)) {
        std::ostringstream msg;
        msg << "decay rate " << process.decay() << " is not negative; the envelope would not dominate";
        throw NonStationarySpec(msg.str());
    }
    if (!report.admissible() && !options.override_validation) {
        std::ostringstream msg;
        msg << "spec failed validation:";
        for (const auto& issue : report.issues) msg << ' ' << to_string(issue.kind) << " (" << issue.detail << ')';
        throw NonStationarySpec(msg.str());
    }
    log_.meta.horizon = horizon;
    log_.meta.spec_hash = spec_hash;
    log_.meta.components = static_cast<int>(process.channels());
}

bool ThinningEngine::start(double t, int mark) {
    if (t > horizon_) {
        return false;
    }
    ++log_.meta.proposed;
    ++log_.meta.accepted;
    state_ = process_.apply_event(state_, t, static_cast<std::size_t>(mark - 1));
    tracker_.on_event(t, mark);
    t_ = t;
    log_.times.push_back(t);
    log_.marks.push_back(mark);
    return true;
}

int ThinningEngine::decide(double t, double rate, double u) {
    ++log_.meta.proposed;
    t_ = t;

    const auto& eig = process_.eigenvalues();
    const double dt = t - state_.last_event_time;
    for (Eigen::Index j = 0; j < eig.size(); ++j) {
        decayed_[j] = state_.modes[j] * std::exp(eig[j] * dt);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < lambda_.size(); ++c) {
        const auto& w = process_.weights(c);
        Complex acc{0.0, 0.0};
        for (Eigen::Index j = 0; j < eig.size(); ++j) {
            acc += w[j] * decayed_[j];
        }
        lambda_[c] = process_.mu(c) + acc.real();
        total += lambda_[c];
        if (enforce_floor_ && lambda_[c] < process_.mu(c) - 1e-9) {
            std::ostringstream msg;
            msg << "intensity of channel " << c + 1 << " is " << lambda_[c] << " at t=" << t;
            throw NegativeIntensity(msg.str());
        }
    }

    const double envelope = tracker_.value(t);
    if (total > envelope + kBoundSlack) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "intensity " << total << " exceeds envelope " << envelope << " at t=" << t;
        throw BoundViolation(msg.str());
    }

    // A gap that rounds to zero would duplicate the previous event time.
    if (!log_.times.empty() && t <= log_.times.back()) {
        return 0;
    }

    // Negative intensities (possible only for specs with a negative kernel)
    // count as zero.
    const double threshold = u * rate;
    double cumulative = 0.0;
    int mark = 0;
    for (std::size_t c = 0; c < lambda_.size(); ++c) {
        cumulative += std::max(lambda_[c], 0.0);
        if (threshold <= cumulative) {
            mark = static_cast<int>(c) + 1;
            break;
        }
    }
    if (mark == 0) {
        return 0;
    }

    ++log_.meta.accepted;
    state_.modes = decayed_ + process_.jump(static_cast<std::size_t>(mark - 1));
    state_.last_event_time = t;
    tracker_.on_event(t, mark);
    log_.times.push_back(t);
    log_.marks.push_back(mark);
    return mark;
}

EventLog ThinningEngine::finish(std::uint64_t seed) {
    log_.meta.seed = seed;
    log_.meta.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    return std::move(log_);
}

}  // namespace detail

std::vector<IntensitySample> trace_path(const ModalProcess& process, const EventLog& log,
                                        std::span<const double> times) {
    std::vector<IntensitySample> out;
    out.reserve(times.size());
    ProcessState state = process.initial_state();
    BoundTracker tracker = BoundTracker::for_process(process);
    std::size_t next = 0;
    double previous = -std::numeric_limits<double>::infinity();
    for (double t : times) {
        if (t < previous) {
            throw std::invalid_argument("trace_path needs sorted sample times");
        }
        previous = t;
        while (next < log.times.size() && log.times[next] < t) {
            const int mark = log.marks[next];
            state = process.apply_event(state, log.times[next], static_cast<std::size_t>(mark - 1));
            tracker.on_event(log.times[next], mark);
            ++next;
        }
        IntensitySample s;
        s.t = t;
        for (std::size_t c = 0; c < process.channels() && c < 2; ++c) {
            s.lambda[c] = process.channel_intensity(state, c, t);
            s.lambda_sum += s.lambda[c];
        }
        s.lambda_bar = tracker.value(t);
        out.push_back(s);
    }
    return out;
}

std::vector<double> uniform_grid(double horizon, double dt) {
    if (!(dt > 0.0) || !(horizon >= 0.0)) {
        throw std::invalid_argument("grid needs dt > 0 and horizon >= 0");
    }
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
    grid.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        grid.push_back(static_cast<double>(i) * dt);
    }
    return grid;
}

}  // namespace carma_hawkes
