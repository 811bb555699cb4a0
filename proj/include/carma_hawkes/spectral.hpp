#pragma once

// Spectral machinery for the CARMA state equation dX = A X dt + e dN.
//
// A is the companion matrix of the monic polynomial
//     a(z) = z^p + a_1 z^{p-1} + ... + a_p,
// diagonalised by the Vandermonde matrix S whose j-th column is
// [1, l_j, l_j^2, ..., l_j^{p-1}] for the roots l_j of a(z). Everything the
// simulator needs (matrix-exponential action, kernel weights, bound
// constants) follows from the roots alone, so S is only materialised on the
// cross-check routes.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace carma_hawkes {

using Complex = std::complex<double>;

// Coefficients a_1..a_p of the monic characteristic polynomial.
class PolyCoeffs {
public:
    explicit PolyCoeffs(std::vector<double> a);

    std::size_t order() const { return a_.size(); }
    const std::vector<double>& values() const { return a_; }
    double operator[](std::size_t i) const { return a_[i]; }

    // a(z), evaluated by Horner's rule.
    Complex evaluate(Complex z) const;
    // a'(z) = p z^{p-1} + a_1 (p-1) z^{p-2} + ... + a_{p-1}.
    Complex derivative(Complex z) const;

    bool operator==(const PolyCoeffs&) const = default;

private:
    std::vector<double> a_;
};

struct SpectralData {
    std::size_t order = 0;
    // Roots of a(z), sorted by decreasing real part then decreasing imaginary
    // part. Complex roots come in exact conjugate pairs.
    Eigen::VectorXcd eigenvalues;
    Eigen::VectorXcd aprime;  // a'(l_j)
    Eigen::VectorXcd sinv_e;  // S^{-1} e = 1 / a'(l_j)
    double decay = 0.0;       // max_j Re(l_j)
};

// Tolerances used by spectral_decompose.
inline constexpr double kDistinctnessTolerance = 1e-7;
inline constexpr double kRootResidualTolerance = 1e-9;

Eigen::MatrixXd build_companion(const PolyCoeffs& a);

// Throws DegenerateEigenvalues or RootFindingFailure.
SpectralData spectral_decompose(const PolyCoeffs& a);

// The eigenvector matrix S (only used on cross-check routes).
Eigen::MatrixXcd vandermonde(const SpectralData& s);

// Coordinates of v in the eigenbasis, S^{-1} v, by solving the Vandermonde
// system (no explicit inverse).
Eigen::VectorXcd to_modal(const SpectralData& s, const Eigen::VectorXcd& v);
// S z.
Eigen::VectorXcd from_modal(const SpectralData& s, const Eigen::VectorXcd& z);

// e^{A dt} v = S diag(e^{l_j dt}) S^{-1} v, before discarding the imaginary
// residue. Throws NumericalOverflow if some e^{l_j dt} is not finite.
Eigen::VectorXcd exp_action_complex(const SpectralData& s, const Eigen::VectorXcd& v, double dt);
Eigen::VectorXd exp_action(const SpectralData& s, const Eigen::VectorXd& v, double dt);

// diag(e^{l_j dt}) as a vector; throws NumericalOverflow.
Eigen::VectorXcd modal_propagator(const SpectralData& s, double dt);

// b(l_j) = b_0 + b_1 l_j + ... + b_{p-1} l_j^{p-1} for every root, which is
// the row vector b^T S.
Eigen::VectorXcd ma_at_eigenvalues(const SpectralData& s, std::span<const double> b);

// The constant K = ||b^T S||_2 ||S^{-1} e||_2 of the intensity envelope,
// computed along two independent routes.
struct BoundConstantForms {
    // Materialised S: ||b^T S||_2 times the norm of the solution of S z = e.
    double norm_product = 0.0;
    // sqrt(sum |b(l_j)|^2) * sqrt(sum 1/|a'(l_j)|^2).
    double spectral = 0.0;
};

BoundConstantForms bound_constant_forms(const SpectralData& s, std::span<const double> b);

// Spectral form of K; throws SpectralError when the two routes disagree by
// more than 1e-8 relative (a sign of an ill-conditioned eigenbasis).
double bound_constant(const SpectralData& s, std::span<const double> b);

// Largest |e^{l_j t}|, i.e. the induced 2-norm of e^{Lambda t}.
double modal_growth(const SpectralData& s, double t);

}  // namespace carma_hawkes
