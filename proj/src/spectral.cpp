#include "carma_hawkes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "carma_hawkes/errors.hpp"

namespace carma_hawkes {

PolyCoeffs::PolyCoeffs(std::vector<double> a) : a_(std::move(a)) {
    if (a_.empty()) {
        throw InvalidSpec("AR polynomial needs at least one coefficient");
    }
    for (double v : a_) {
        if (!std::isfinite(v)) {
            throw InvalidSpec("AR coefficients must be finite");
        }
    }
}

Complex PolyCoeffs::evaluate(Complex z) const {
    Complex acc{1.0, 0.0};
    for (double c : a_) {
        acc = acc * z + c;
    }
    return acc;
}

Complex PolyCoeffs::derivative(Complex z) const {
    const auto p = static_cast<double>(a_.size());
    Complex acc{p, 0.0};
    for (std::size_t k = 0; k + 1 < a_.size(); ++k) {
        acc = acc * z + a_[k] * (p - 1.0 - static_cast<double>(k));
    }
    return acc;
}

Eigen::MatrixXd build_companion(const PolyCoeffs& a) {
    const auto p = static_cast<Eigen::Index>(a.order());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        m(i, i + 1) = 1.0;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        m(p - 1, j) = -a[static_cast<std::size_t>(p - 1 - j)];
    }
    return m;
}

namespace {

double root_scale(const Eigen::VectorXcd& roots) {
    double m = 1.0;
    for (const auto& r : roots) {
        m = std::max(m, std::abs(r));
    }
    return m;
}

double min_pairwise_distance(const Eigen::VectorXcd& roots) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        for (Eigen::Index j = i + 1; j < roots.size(); ++j) {
            d = std::min(d, std::abs(roots[i] - roots[j]));
        }
    }
    return d;
}

void check_distinct(const Eigen::VectorXcd& roots) {
    const double dist = min_pairwise_distance(roots);
    if (dist < kDistinctnessTolerance * root_scale(roots)) {
        std::ostringstream msg;
        msg << "characteristic polynomial has (nearly) repeated roots; min distance " << dist;
        throw DegenerateEigenvalues(msg.str());
    }
}

// A few Newton steps; stops once the step no longer shrinks the residual.
Complex polish(const PolyCoeffs& a, Complex z) {
    for (int it = 0; it < 8; ++it) {
        const Complex f = a.evaluate(z);
        const Complex df = a.derivative(z);
        if (std::abs(df) == 0.0) {
            break;
        }
        const Complex next = z - f / df;
        if (!(std::abs(a.evaluate(next)) < std::abs(f))) {
            break;
        }
        z = next;
    }
    return z;
}

}  // namespace

SpectralData spectral_decompose(const PolyCoeffs& a) {
    const std::size_t p = a.order();
    Eigen::VectorXcd raw(static_cast<Eigen::Index>(p));
    if (p == 1) {
        raw[0] = Complex{-a[0], 0.0};
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(build_companion(a), false);
        if (solver.info() != Eigen::Success) {
            throw RootFindingFailure("eigensolver did not converge on the companion matrix");
        }
        raw = solver.eigenvalues();
    }

    std::vector<Complex> roots(raw.begin(), raw.end());
    std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    Eigen::VectorXcd sorted = Eigen::Map<Eigen::VectorXcd>(roots.data(), static_cast<Eigen::Index>(p));
    check_distinct(sorted);

    // The real Schur form yields exact conjugates and exactly real roots;
    // polish each root while keeping that structure.
    for (Eigen::Index j = 0; j < sorted.size(); ++j) {
        Complex& z = sorted[j];
        if (z.imag() == 0.0) {
            z = Complex{polish(a, z).real(), 0.0};
        } else if (z.imag() > 0.0) {
            z = polish(a, z);
            for (Eigen::Index k = 0; k < sorted.size(); ++k) {
                if (k != j && sorted[k].imag() < 0.0 && std::abs(sorted[k] - std::conj(roots[static_cast<std::size_t>(j)])) == 0.0) {
                    sorted[k] = std::conj(z);
                    break;
                }
            }
        }
    }
    check_distinct(sorted);

    double amax = 1.0;
    for (double c : a.values()) {
        amax = std::max(amax, std::abs(c));
    }
    for (const auto& z : sorted) {
        const double residual = std::abs(a.evaluate(z));
        if (!(residual < kRootResidualTolerance * amax)) {
            std::ostringstream msg;
            msg << "root " << z << " leaves residual " << residual;
            throw RootFindingFailure(msg.str());
        }
    }

    SpectralData s;
    s.order = p;
    s.eigenvalues = sorted;
    s.aprime.resize(sorted.size());
    s.sinv_e.resize(sorted.size());
    s.decay = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < sorted.size(); ++j) {
        s.aprime[j] = a.derivative(sorted[j]);
        s.sinv_e[j] = 1.0 / s.aprime[j];
        s.decay = std::max(s.decay, sorted[j].real());
    }
    return s;
}

Eigen::MatrixXcd vandermonde(const SpectralData& s) {
    const auto p = static_cast<Eigen::Index>(s.order);
    Eigen::MatrixXcd v(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        Complex pw{1.0, 0.0};
        for (Eigen::Index i = 0; i < p; ++i) {
            v(i, j) = pw;
            pw *= s.eigenvalues[j];
        }
    }
    return v;
}

Eigen::VectorXcd to_modal(const SpectralData& s, const Eigen::VectorXcd& v) {
    return vandermonde(s).partialPivLu().solve(v);
}

Eigen::VectorXcd from_modal(const SpectralData& s, const Eigen::VectorXcd& z) {
    return vandermonde(s) * z;
}

Eigen::VectorXcd modal_propagator(const SpectralData& s, double dt) {
    Eigen::VectorXcd g(s.eigenvalues.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        g[j] = std::exp(s.eigenvalues[j] * dt);
        if (!std::isfinite(g[j].real()) || !std::isfinite(g[j].imag())) {
            throw NumericalOverflow("exp(lambda * dt) overflows");
        }
    }
    return g;
}

Eigen::VectorXcd exp_action_complex(const SpectralData& s, const Eigen::VectorXcd& v, double dt) {
    if (dt == 0.0) {
        return v;
    }
    const Eigen::VectorXcd z = to_modal(s, v);
    return from_modal(s, modal_propagator(s, dt).cwiseProduct(z));
}

Eigen::VectorXd exp_action(const SpectralData& s, const Eigen::VectorXd& v, double dt) {
    return exp_action_complex(s, v.cast<Complex>(), dt).real();
}

Eigen::VectorXcd ma_at_eigenvalues(const SpectralData& s, std::span<const double> b) {
    Eigen::VectorXcd out(s.eigenvalues.size());
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        Complex acc{0.0, 0.0};
        for (auto it = b.rbegin(); it != b.rend(); ++it) {
            acc = acc * s.eigenvalues[j] + *it;
        }
        out[j] = acc;
    }
    return out;
}

BoundConstantForms bound_constant_forms(const SpectralData& s, std::span<const double> b) {
    const auto p = static_cast<Eigen::Index>(s.order);
    Eigen::VectorXcd bvec = Eigen::VectorXcd::Zero(p);
    for (Eigen::Index i = 0; i < p && i < static_cast<Eigen::Index>(b.size()); ++i) {
        bvec[i] = b[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(p);
    e[p - 1] = 1.0;

    const Eigen::MatrixXcd sm = vandermonde(s);
    const Eigen::VectorXcd bts = sm.transpose() * bvec;
    const Eigen::VectorXcd sinv_e = sm.partialPivLu().solve(e);

    BoundConstantForms forms;
    forms.norm_product = bts.norm() * sinv_e.norm();

    double bsq = 0.0;
    double asq = 0.0;
    const Eigen::VectorXcd bl = ma_at_eigenvalues(s, b);
    for (Eigen::Index j = 0; j < p; ++j) {
        bsq += std::norm(bl[j]);
        asq += 1.0 / std::norm(s.aprime[j]);
    }
    forms.spectral = std::sqrt(bsq) * std::sqrt(asq);
    return forms;
}

double bound_constant(const SpectralData& s, std::span<const double> b) {
    const auto forms = bound_constant_forms(s, b);
    const double scale = std::max(std::abs(forms.spectral), std::abs(forms.norm_product));
    if (std::abs(forms.spectral - forms.norm_product) > 1e-8 * scale) {
        std::ostringstream msg;
        msg << "bound constant routes disagree: " << forms.norm_product << " vs " << forms.spectral;
        throw SpectralError(msg.str());
    }
    return forms.spectral;
}

double modal_growth(const SpectralData& s, double t) {
    double m = 0.0;
    for (const auto& l : s.eigenvalues) {
        m = std::max(m, std::abs(std::exp(l * t)));
    }
    return m;
}

}  // namespace carma_hawkes
