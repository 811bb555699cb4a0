#pragma once

// Reference computations that deliberately avoid the library's modal
// (diagonalised) code paths: dense matrix exponentials, direct envelope sums,
// adaptive quadrature and brute-force empirical CDF scans.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "carma_hawkes/model.hpp"

namespace carma_hawkes::testing {

// Companion matrix written out independently of build_companion.
inline Eigen::MatrixXd dense_companion(const std::vector<double>& a) {
    const auto p = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i + 1 < p; ++i) m(i, i + 1) = 1.0;
    for (Eigen::Index k = 1; k <= p; ++k) m(p - 1, p - k) = -a[static_cast<std::size_t>(k - 1)];
    return m;
}

// sum_{T_i <= t} expm(A (t - T_i)) e via Pade scaling-and-squaring.
inline Eigen::VectorXd direct_state(const std::vector<double>& a, std::span<const double> events, double t) {
    const Eigen::MatrixXd A = dense_companion(a);
    const auto p = A.rows();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
    e[p - 1] = 1.0;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
    for (double ti : events) {
        if (ti <= t) {
            const Eigen::MatrixXd m = (A * (t - ti)).exp();
            x += m * e;
        }
    }
    return x;
}

// mu + b^T sum_{T_i < t} expm(A (t - T_i)) e.
inline double direct_intensity(const UnivariateSpec& spec, std::span<const double> events, double t) {
    std::vector<double> before;
    for (double ti : events) {
        if (ti < t) before.push_back(ti);
    }
    const Eigen::VectorXd x = direct_state(spec.a.values(), before, t);
    const Eigen::Map<const Eigen::VectorXd> b(spec.b.data(), static_cast<Eigen::Index>(spec.b.size()));
    return spec.mu + b.dot(x);
}

// Bivariate intensities from dense block exponentials.
inline std::array<double, 2> direct_bivariate_intensity(const BivariateSpec& spec, std::span<const double> times,
                                                        std::span<const int> marks, double t) {
    std::array<std::vector<double>, 2> by_mark;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t) by_mark[static_cast<std::size_t>(marks[i] - 1)].push_back(times[i]);
    }
    const Eigen::VectorXd x1 = direct_state(spec.a1.values(), by_mark[0], t);
    const Eigen::VectorXd x2 = direct_state(spec.a2.values(), by_mark[1], t);
    auto dot = [](const std::vector<double>& b, const Eigen::VectorXd& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * x[static_cast<Eigen::Index>(i)];
        return s;
    };
    return {spec.mu[0] + dot(spec.b11, x1) + dot(spec.b12, x2), spec.mu[1] + dot(spec.b21, x1) + dot(spec.b22, x2)};
}

// base + sum_{T_i < t} K_{mark_i} exp(decay (t - T_i)).
inline double direct_envelope(double base, double decay, std::span<const double> jumps, std::span<const double> times,
                              std::span<const int> marks, double t) {
    double v = base;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t) v += jumps[static_cast<std::size_t>(marks[i] - 1)] * std::exp(decay * (t - times[i]));
    }
    return v;
}

template <class F>
double adaptive_quadrature(F&& f, double lo, double hi) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-13);
}

// sup_y |F_n(y) - (1 - e^{-y})| scanned over a dense grid plus every sample
// point and its left neighbour.
inline double brute_force_ks(std::span<const double> sample) {
    std::vector<double> pts;
    const double top = *std::max_element(sample.begin(), sample.end()) * 1.5 + 1.0;
    for (int i = 0; i <= 20000; ++i) pts.push_back(top * i / 20000.0);
    for (double x : sample) {
        pts.push_back(x);
        pts.push_back(std::nextafter(x, -1e300));
    }
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (double y : pts) {
        const auto below = static_cast<double>(std::count_if(sample.begin(), sample.end(), [y](double x) { return x <= y; }));
        const double f = y <= 0.0 ? 0.0 : 1.0 - std::exp(-y);
        d = std::max(d, std::abs(below / n - f));
    }
    return d;
}

// Monic polynomial coefficients a_1..a_p from its roots.
inline std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> a;
    for (std::size_t i = 1; i < c.size(); ++i) a.push_back(c[i].real());
    return a;
}

// Random stationary spec with p <= max_p: well separated stable roots (real
// or conjugate pairs), random MA tail and b_0 chosen so b_0 / a_p < 1.
inline UnivariateSpec random_stationary_spec(std::mt19937_64& gen, std::size_t max_p = 5) {
    std::uniform_int_distribution<std::size_t> order(1, max_p);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t p = order(gen);
    std::vector<std::complex<double>> roots;
    while (roots.size() < p) {
        std::vector<std::complex<double>> cand;
        if (p - roots.size() >= 2 && unit(gen) < 0.5) {
            const double re = -(0.2 + 2.8 * unit(gen));
            const double im = 0.3 + 2.7 * unit(gen);
            cand = {{re, im}, {re, -im}};
        } else {
            cand = {{-(0.2 + 3.8 * unit(gen)), 0.0}};
        }
        bool separated = true;
        for (const auto& c : cand) {
            for (const auto& r : roots) separated = separated && std::abs(c - r) > 0.15;
        }
        if (separated) roots.insert(roots.end(), cand.begin(), cand.end());
    }
    const std::vector<double> a = poly_from_roots(roots);
    std::uniform_int_distribution<std::size_t> qdist(0, p - 1);
    std::vector<double> b(qdist(gen) + 1);
    for (auto& x : b) x = 2.0 * unit(gen) - 1.0;
    b[0] = (0.1 + 0.8 * unit(gen)) * a.back();
    return make_univariate_spec(0.1 + 0.9 * unit(gen), a, b);
}

}  // namespace carma_hawkes::testing
