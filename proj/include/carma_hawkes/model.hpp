#pragma once

// CARMA(p,q)-Hawkes model specifications and their exact evaluation.
//
// Univariate:  lambda_t = mu + b^T X_t,   dX_t = A X_t dt + e dN_t,  X_0 = 0.
// Bivariate:   lambda_t = mu + B X_t,     dX_t = blockdiag(A1, A2) X_t dt + E dN_t,
// where channel i of B reads [b_{i1}^T  b_{i2}^T] and E routes a mark-m event
// into the last coordinate of block m.
//
// Internally the state is held in modal coordinates z = S^{-1} X, so that
// propagation over dt is a diagonal multiply by e^{l_j dt} and the intensity
// is a weighted sum of decaying exponentials.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "carma_hawkes/spectral.hpp"

namespace carma_hawkes {

struct UnivariateSpec {
    double mu = 0.0;
    PolyCoeffs a{std::vector<double>{1.0}};
    std::vector<double> b;  // b_0..b_{p-1}, zero-padded past q
    std::size_t q = 0;

    std::size_t order() const { return a.order(); }
};

// Builds a spec from user-facing MA entries b_0..b_q (q < p); pads with
// zeros. Throws InvalidSpec.
UnivariateSpec make_univariate_spec(double mu, std::vector<double> a, std::vector<double> b);

struct BivariateSpec {
    std::array<double, 2> mu{};
    PolyCoeffs a1{std::vector<double>{1.0}};
    PolyCoeffs a2{std::vector<double>{1.0}};
    // b_{ij} is the response of channel i to events of mark j; its length is
    // the order of the source block j.
    std::vector<double> b11, b12, b21, b22;
    std::array<std::size_t, 4> q{};  // q1, q12, q21, q2

    std::array<std::size_t, 2> orders() const { return {a1.order(), a2.order()}; }
    const std::vector<double>& b(int channel, int mark) const;
};

BivariateSpec make_bivariate_spec(std::array<double, 2> mu, std::vector<double> a1, std::vector<double> a2,
                                  std::vector<double> b11, std::vector<double> b12, std::vector<double> b21,
                                  std::vector<double> b22);

using ModelSpec = std::variant<UnivariateSpec, BivariateSpec>;

// Stable 64-bit fingerprint of a spec (FNV-1a over a canonical text form).
std::uint64_t spec_hash(const UnivariateSpec& spec);
std::uint64_t spec_hash(const BivariateSpec& spec);
std::uint64_t spec_hash(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Validation

enum class IssueKind { NonStationary, KernelNegative, DegenerateEigenvalues, RootFindingFailure };

std::string_view to_string(IssueKind kind);

struct ValidationIssue {
    IssueKind kind;
    std::string detail;
};

struct KernelSummary {
    std::string name;  // "h" or "h11", "h12", ...
    double branching = 0.0;             // b_0 / a_p
    double branching_quadrature = 0.0;  // numerical integral of the kernel
    double kernel_min = 0.0;            // minimum over the check grid
};

struct ValidationReport {
    // Univariate: integral of h. Bivariate: spectral radius of the 2x2
    // branching matrix.
    double branching = 0.0;
    double decay = 0.0;
    double kernel_min = 0.0;
    std::vector<KernelSummary> kernels;
    std::optional<Eigen::Matrix2d> branching_matrix;
    std::vector<ValidationIssue> issues;

    bool admissible() const { return issues.empty(); }
    bool has(IssueKind kind) const;
};

inline constexpr double kKernelNegativeThreshold = -1e-12;
inline constexpr std::size_t kKernelGridPoints = 4000;

// t = 0 followed by log-spaced points on [1e-6, 1] * 20 / |decay|.
std::vector<double> kernel_check_grid(double decay);

// Never throws on admissibility problems; they are reported as issues.
ValidationReport validate(const UnivariateSpec& spec);
ValidationReport validate(const BivariateSpec& spec);
ValidationReport validate(const ModelSpec& spec);

// h(t) = Re sum_j b(l_j)/a'(l_j) e^{l_j t}.
double kernel_from_spectrum(const SpectralData& s, std::span<const double> b, double t);

// ---------------------------------------------------------------------------
// State and exact evolution

struct ProcessState {
    Eigen::VectorXcd modes;        // S^{-1} X at last_event_time, jump included
    double last_event_time = 0.0;
};

// Diagonalised form shared by the univariate and bivariate processes: a set
// of modes, one weight vector per intensity channel and one jump vector per
// mark. The thinning engine and the diagnostics only see this view.
class ModalProcess {
public:
    struct Block {
        Eigen::Index offset;
        SpectralData spectral;
    };

    ModalProcess(std::vector<Block> blocks, std::vector<double> mu, std::vector<Eigen::VectorXcd> weights,
                 std::vector<Eigen::VectorXcd> jumps, std::vector<double> bound_jump);

    std::size_t modes() const { return static_cast<std::size_t>(eigenvalues_.size()); }
    std::size_t channels() const { return mu_.size(); }
    std::size_t marks() const { return jumps_.size(); }

    const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
    const Eigen::VectorXcd& weights(std::size_t channel) const { return weights_[channel]; }
    const Eigen::VectorXcd& jump(std::size_t mark) const { return jumps_[mark]; }
    double mu(std::size_t channel) const { return mu_[channel]; }
    // Sum of baselines: the floor of the dominating envelope.
    double base() const { return base_; }
    double decay() const { return decay_; }
    // Envelope increment for an event of the given mark (0-based).
    double bound_jump(std::size_t mark) const { return bound_jump_[mark]; }
    const std::vector<double>& bound_jumps() const { return bound_jump_; }

    ProcessState initial_state() const;
    double channel_intensity(const ProcessState& state, std::size_t channel, double t) const;
    ProcessState apply_event(const ProcessState& state, double t, std::size_t mark) const;
    double compensator_increment(const ProcessState& state, std::size_t channel, double t0, double t1) const;
    // X = S z, block by block.
    Eigen::VectorXd state_vector(const ProcessState& state) const;

private:
    std::vector<Block> blocks_;
    Eigen::VectorXcd eigenvalues_;
    std::vector<double> mu_;
    std::vector<Eigen::VectorXcd> weights_;
    std::vector<Eigen::VectorXcd> jumps_;
    std::vector<double> bound_jump_;
    double base_ = 0.0;
    double decay_ = 0.0;
};

class UnivariateModel {
public:
    // Throws SpectralError subclasses when A is not diagonalisable.
    explicit UnivariateModel(UnivariateSpec spec);

    const UnivariateSpec& spec() const { return spec_; }
    const SpectralData& spectral() const { return spectral_; }
    const ValidationReport& validation() const { return report_; }
    const ModalProcess& process() const { return process_; }
    std::uint64_t hash() const { return hash_; }

    double bound_constant() const { return process_.bound_jump(0); }
    BoundConstantForms bound_constant_forms() const;

    double kernel_value(double t) const;
    ProcessState initial_state() const { return process_.initial_state(); }
    // Throws NegativeIntensity if the result drops below mu for an
    // admissible spec.
    double intensity_at(const ProcessState& state, double t) const;
    ProcessState apply_event(const ProcessState& state, double t) const;
    double compensator_increment(const ProcessState& state, double t0, double t1) const;

    // mu / (1 - branching); infinite when the branching ratio is >= 1.
    double stationary_rate() const;

private:
    UnivariateSpec spec_;
    SpectralData spectral_;
    ValidationReport report_;
    ModalProcess process_;
    std::uint64_t hash_;
};

class BivariateModel {
public:
    explicit BivariateModel(BivariateSpec spec);

    const BivariateSpec& spec() const { return spec_; }
    const SpectralData& spectral(int block) const { return spectral_[static_cast<std::size_t>(block - 1)]; }
    const ValidationReport& validation() const { return report_; }
    const ModalProcess& process() const { return process_; }
    std::uint64_t hash() const { return hash_; }

    // Envelope increment K_m for an event of mark m in {1, 2}.
    double bound_constant(int mark) const { return process_.bound_jump(static_cast<std::size_t>(mark - 1)); }
    BoundConstantForms bound_constant_forms(int mark) const;

    // h_{ij}(t): response of channel i to an event of mark j.
    double kernel_value(int channel, int mark, double t) const;
    ProcessState initial_state() const { return process_.initial_state(); }
    std::array<double, 2> intensity_at(const ProcessState& state, double t) const;
    ProcessState apply_event(const ProcessState& state, double t, int mark) const;
    double compensator_increment(const ProcessState& state, double t0, double t1, int component) const;

    // (I - H)^{-1} mu for the branching matrix H; infinite entries when the
    // spectral radius of H is >= 1.
    std::array<double, 2> stationary_rates() const;

private:
    BivariateSpec spec_;
    std::array<SpectralData, 2> spectral_;
    ValidationReport report_;
    ModalProcess process_;
    std::uint64_t hash_;
};

using Model = std::variant<UnivariateModel, BivariateModel>;

Model make_model(const ModelSpec& spec);

}  // namespace carma_hawkes
