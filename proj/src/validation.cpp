#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Eigenvalues>

#include "carma_hawkes/errors.hpp"
#include "carma_hawkes/model.hpp"

namespace carma_hawkes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double grid_horizon(double decay) {
    if (std::isfinite(decay) && decay < 0.0) return 20.0 / -decay;
    return 20.0;
}

KernelSummary summarize_kernel(std::string name, const SpectralData& s, const std::vector<double>& b,
                               const PolyCoeffs& a) {
    KernelSummary k;
    k.name = std::move(name);
    const double ap = a[a.order() - 1];
    k.branching = ap == 0.0 ? std::numeric_limits<double>::infinity() : b[0] / ap;

    k.kernel_min = std::numeric_limits<double>::infinity();
    for (double t : kernel_check_grid(s.decay)) {
        k.kernel_min = std::min(k.kernel_min, kernel_from_spectrum(s, b, t));
    }

    if (s.decay < 0.0) {
        auto h = [&](double t) { return kernel_from_spectrum(s, b, t); };
        k.branching_quadrature =
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(h, 0.0, 50.0 / -s.decay, 20, 1e-13);
    } else {
        k.branching_quadrature = std::numeric_limits<double>::infinity();
    }
    return k;
}

void add_spectral_issue(ValidationReport& report, const SpectralError& err, const char* which) {
    const IssueKind kind =
        dynamic_cast<const DegenerateEigenvalues*>(&err) ? IssueKind::DegenerateEigenvalues : IssueKind::RootFindingFailure;
    report.issues.push_back({kind, std::string(which) + ": " + err.what()});
}

void add_kernel_issue(ValidationReport& report) {
    if (report.kernel_min < kKernelNegativeThreshold) {
        std::ostringstream msg;
        msg << "kernel minimum " << report.kernel_min << " on the check grid";
        for (const auto& k : report.kernels) {
            if (k.kernel_min < kKernelNegativeThreshold) msg << "; " << k.name << " min " << k.kernel_min;
        }
        report.issues.push_back({IssueKind::KernelNegative, msg.str()});
    }
}

}  // namespace

std::string_view to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::NonStationary: return "NonStationary";
        case IssueKind::KernelNegative: return "KernelNegative";
        case IssueKind::DegenerateEigenvalues: return "DegenerateEigenvalues";
        case IssueKind::RootFindingFailure: return "RootFindingFailure";
    }
    return "Unknown";
}

bool ValidationReport::has(IssueKind kind) const {
    return std::any_of(issues.begin(), issues.end(), [kind](const auto& i) { return i.kind == kind; });
}

std::vector<double> kernel_check_grid(double decay) {
    const double tmax = grid_horizon(decay);
    std::vector<double> grid;
    grid.reserve(kKernelGridPoints);
    grid.push_back(0.0);
    const double lo = std::log(1e-6 * tmax);
    const double hi = std::log(tmax);
    const auto n = static_cast<double>(kKernelGridPoints - 2);
    for (std::size_t i = 0; i + 1 < kKernelGridPoints; ++i) {
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / n));
    }
    grid.back() = tmax;
    return grid;
}

double kernel_from_spectrum(const SpectralData& s, std::span<const double> b, double t) {
    const Eigen::VectorXcd bl = ma_at_eigenvalues(s, b);
    Complex acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < bl.size(); ++j) {
        acc += bl[j] * s.sinv_e[j] * std::exp(s.eigenvalues[j] * t);
    }
    return acc.real();
}

ValidationReport validate(const UnivariateSpec& spec) {
    ValidationReport report;
    report.branching = kNaN;
    report.decay = kNaN;
    report.kernel_min = kNaN;

    SpectralData s;
    try {
        s = spectral_decompose(spec.a);
    } catch (const SpectralError& err) {
        add_spectral_issue(report, err, "A");
        return report;
    }

    report.kernels.push_back(summarize_kernel("h", s, spec.b, spec.a));
    report.branching = report.kernels[0].branching;
    report.decay = s.decay;
    report.kernel_min = report.kernels[0].kernel_min;

    if (!(report.decay < 0.0) || !(report.branching < 1.0) || report.branching < 0.0) {
        std::ostringstream msg;
        msg << "branching ratio " << report.branching << ", decay " << report.decay;
        report.issues.push_back({IssueKind::NonStationary, msg.str()});
    }
    add_kernel_issue(report);
    return report;
}

ValidationReport validate(const BivariateSpec& spec) {
    ValidationReport report;
    report.branching = kNaN;
    report.decay = kNaN;
    report.kernel_min = kNaN;

    std::array<SpectralData, 2> s;
    const std::array<const PolyCoeffs*, 2> polys{&spec.a1, &spec.a2};
    bool ok = true;
    for (std::size_t j = 0; j < 2; ++j) {
        try {
            s[j] = spectral_decompose(*polys[j]);
        } catch (const SpectralError& err) {
            add_spectral_issue(report, err, j == 0 ? "A1" : "A2");
            ok = false;
        }
    }
    if (!ok) return report;

    Eigen::Matrix2d h;
    report.kernel_min = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const auto idx = static_cast<std::size_t>(j - 1);
            auto k = summarize_kernel("h" + std::to_string(i) + std::to_string(j), s[idx], spec.b(i, j), *polys[idx]);
            h(i - 1, j - 1) = k.branching;
            report.kernel_min = std::min(report.kernel_min, k.kernel_min);
            report.kernels.push_back(std::move(k));
        }
    }
    report.branching_matrix = h;
    report.branching = Eigen::EigenSolver<Eigen::Matrix2d>(h, false).eigenvalues().cwiseAbs().maxCoeff();
    report.decay = std::max(s[0].decay, s[1].decay);

    if (!(report.decay < 0.0) || !(report.branching < 1.0)) {
        std::ostringstream msg;
        msg << "spectral radius of branching matrix " << report.branching << ", decay " << report.decay;
        report.issues.push_back({IssueKind::NonStationary, msg.str()});
    }
    add_kernel_issue(report);
    return report;
}

ValidationReport validate(const ModelSpec& spec) {
    return std::visit([](const auto& s) { return validate(s); }, spec);
}

}  // namespace carma_hawkes
