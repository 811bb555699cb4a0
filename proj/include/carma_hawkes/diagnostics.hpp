#pragma once

// Goodness of fit via the random time change: if Lambda is the compensator
// of a component's intensity, the increments Lambda(T_i) - Lambda(T_{i-1})
// over that component's event times are i.i.d. Exp(1) when the path really
// comes from the model.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "carma_hawkes/model.hpp"
#include "carma_hawkes/thinning.hpp"

namespace carma_hawkes {

struct ResidualSeries {
    std::vector<double> taus;
    int component = 1;
};

// The interval after the last event of the component is censored and
// dropped. Throws SpecLogMismatch when the log was produced by another spec
// or carries marks the model does not have.
ResidualSeries residual_transform(const UnivariateModel& model, const EventLog& log);
ResidualSeries residual_transform(const BivariateModel& model, const EventLog& log, int component);
ResidualSeries residual_transform(const Model& model, const EventLog& log, int component = 1);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// Asymptotic Kolmogorov survival function
//     Q(k) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 k^2),
// summed until terms fall below 1e-12. Below k = 0.5 the equivalent Jacobi
// theta form 1 - sqrt(2 pi)/k sum exp(-(2j-1)^2 pi^2 / (8 k^2)) is used since
// the alternating series needs many terms there.
double kolmogorov_q(double kappa);

// One-sample KS test against Exp(1) with the asymptotic p-value
// Q(sqrt(n) D) (approximate for n below ~35). Throws EmptySample.
KsResult ks_exp1(std::span<const double> sample);
KsResult ks_exp1(const ResidualSeries& residuals);

struct ComponentReport {
    int component = 1;
    std::size_t n_events = 0;
    double empirical_rate = 0.0;
    double theoretical_rate = 0.0;  // infinite for non-stationary specs
    std::optional<KsResult> ks;     // empty when there are no residuals
    double residual_mean = 0.0;     // NaN when there are no residuals
    double acceptance_ratio = 1.0;
};

struct DiagnosticsReport {
    std::vector<ComponentReport> components;
};

DiagnosticsReport summarize(const Model& model, const EventLog& log);

}  // namespace carma_hawkes
