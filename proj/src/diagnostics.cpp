#include "carma_hawkes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "carma_hawkes/errors.hpp"

namespace carma_hawkes {

namespace {

void check_log(const EventLog& log, std::uint64_t hash, std::size_t marks) {
    if (log.meta.spec_hash != 0 && log.meta.spec_hash != hash) {
        throw SpecLogMismatch("event log was produced by a different model spec");
    }
    if (log.times.size() != log.marks.size()) {
        throw SpecLogMismatch("event log has mismatched time and mark columns");
    }
    for (std::size_t i = 0; i < log.times.size(); ++i) {
        if (log.marks[i] < 1 || static_cast<std::size_t>(log.marks[i]) > marks) {
            std::ostringstream msg;
            msg << "mark " << log.marks[i] << " at row " << i << " is not valid for this model";
            throw SpecLogMismatch(msg.str());
        }
        if (log.times[i] < 0.0 || (i > 0 && !(log.times[i] > log.times[i - 1]))) {
            std::ostringstream msg;
            msg << "event times must be non-negative and strictly increasing (row " << i << ")";
            throw SpecLogMismatch(msg.str());
        }
    }
}

ResidualSeries transform(const ModalProcess& process, const EventLog& log, int component) {
    const auto channel = static_cast<std::size_t>(component - 1);
    ResidualSeries out;
    out.component = component;
    ProcessState state = process.initial_state();
    double previous = 0.0;
    double accumulated = 0.0;
    for (std::size_t i = 0; i < log.times.size(); ++i) {
        const double t = log.times[i];
        accumulated += process.compensator_increment(state, channel, previous, t);
        if (process.channels() == 1 || log.marks[i] == component) {
            out.taus.push_back(accumulated);
            accumulated = 0.0;
        }
        state = process.apply_event(state, t, static_cast<std::size_t>(log.marks[i] - 1));
        previous = t;
    }
    return out;
}

double exp1_cdf(double x) {
    return x <= 0.0 ? 0.0 : -std::expm1(-x);
}

}  // namespace

ResidualSeries residual_transform(const UnivariateModel& model, const EventLog& log) {
    check_log(log, model.hash(), 1);
    return transform(model.process(), log, 1);
}

ResidualSeries residual_transform(const BivariateModel& model, const EventLog& log, int component) {
    if (component != 1 && component != 2) {
        throw std::invalid_argument("bivariate component must be 1 or 2");
    }
    check_log(log, model.hash(), 2);
    return transform(model.process(), log, component);
}

ResidualSeries residual_transform(const Model& model, const EventLog& log, int component) {
    if (const auto* u = std::get_if<UnivariateModel>(&model)) {
        return residual_transform(*u, log);
    }
    return residual_transform(std::get<BivariateModel>(model), log, component);
}

double kolmogorov_q(double kappa) {
    if (!(kappa > 0.0)) return 1.0;
    double q = 0.0;
    if (kappa < 0.5) {
        constexpr double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        for (int j = 1;; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(-odd * odd * pi2 / (8.0 * kappa * kappa));
            sum += term;
            if (term < 1e-16 * sum || term == 0.0) break;
        }
        q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / kappa * sum;
    } else {
        double sign = 1.0;
        for (int j = 1;; ++j) {
            const double term = std::exp(-2.0 * j * j * kappa * kappa);
            if (term < 1e-12) break;
            q += sign * term;
            sign = -sign;
        }
        q *= 2.0;
    }
    return std::clamp(q, 0.0, 1.0);
}

KsResult ks_exp1(std::span<const double> sample) {
    if (sample.empty()) {
        throw EmptySample("KS test needs at least one observation");
    }
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = exp1_cdf(x[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    KsResult r;
    r.n = x.size();
    r.statistic = std::clamp(d, 0.0, 1.0);
    r.p_value = kolmogorov_q(std::sqrt(n) * r.statistic);
    return r;
}

KsResult ks_exp1(const ResidualSeries& residuals) {
    return ks_exp1(residuals.taus);
}

DiagnosticsReport summarize(const Model& model, const EventLog& log) {
    DiagnosticsReport report;
    const bool bivariate = std::holds_alternative<BivariateModel>(model);
    std::array<double, 2> theoretical{};
    if (bivariate) {
        theoretical = std::get<BivariateModel>(model).stationary_rates();
    } else {
        theoretical[0] = std::get<UnivariateModel>(model).stationary_rate();
    }

    const int components = bivariate ? 2 : 1;
    for (int c = 1; c <= components; ++c) {
        const ResidualSeries residuals = residual_transform(model, log, c);
        ComponentReport r;
        r.component = c;
        r.n_events = bivariate ? log.count(c) : log.size();
        r.empirical_rate = log.meta.horizon > 0.0 ? static_cast<double>(r.n_events) / log.meta.horizon
                                                  : std::numeric_limits<double>::quiet_NaN();
        r.theoretical_rate = theoretical[static_cast<std::size_t>(c - 1)];
        r.acceptance_ratio = log.meta.acceptance_ratio();
        if (residuals.taus.empty()) {
            r.residual_mean = std::numeric_limits<double>::quiet_NaN();
        } else {
            r.ks = ks_exp1(residuals);
            double sum = 0.0;
            for (double tau : residuals.taus) sum += tau;
            r.residual_mean = sum / static_cast<double>(residuals.taus.size());
        }
        report.components.push_back(r);
    }
    return report;
}

}  // namespace carma_hawkes
