#include "carma_hawkes/model.hpp"

#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "carma_hawkes/errors.hpp"

namespace carma_hawkes {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw InvalidSpec(std::string(what) + " must be finite");
        }
    }
}

// Pads MA entries b_0..b_q to length p; returns q.
std::size_t pad_ma(std::vector<double>& b, std::size_t p, const char* what) {
    if (b.empty()) {
        throw InvalidSpec(std::string(what) + " needs at least b_0");
    }
    if (b.size() > p) {
        std::ostringstream msg;
        msg << what << " has " << b.size() << " entries but the AR order is " << p << " (need q < p)";
        throw InvalidSpec(msg.str());
    }
    require_finite(b, what);
    const std::size_t q = b.size() - 1;
    b.resize(p, 0.0);
    return q;
}

void require_positive_mu(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw InvalidSpec("baseline intensity mu must be positive and finite");
    }
}

class Fnv1a {
public:
    void add(std::string_view s) {
        for (unsigned char c : s) {
            h_ ^= c;
            h_ *= 0x100000001b3ULL;
        }
    }
    void add(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g;", x);
        add(std::string_view(buf));
    }
    void add(const std::vector<double>& v) {
        add("[");
        for (double x : v) add(x);
        add("]");
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// Complex expm1, accurate for small |z|.
Complex expm1(Complex z) {
    const double s = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

// ||1^T B S||_2, block by block, via polynomial evaluation at the roots.
double norm_of_sum_row(const SpectralData& s1, const std::vector<double>& b1, const SpectralData& s2,
                       const std::vector<double>& b2) {
    return std::sqrt(ma_at_eigenvalues(s1, b1).squaredNorm() + ma_at_eigenvalues(s2, b2).squaredNorm());
}

std::vector<double> add(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

ModalProcess build_univariate_process(const UnivariateSpec& spec, const SpectralData& s) {
    const double k = bound_constant(s, spec.b);
    std::vector<ModalProcess::Block> blocks{{0, s}};
    return ModalProcess(std::move(blocks), {spec.mu}, {ma_at_eigenvalues(s, spec.b)}, {s.sinv_e}, {k});
}

ModalProcess build_bivariate_process(const BivariateSpec& spec, const std::array<SpectralData, 2>& s) {
    const auto p1 = static_cast<Eigen::Index>(s[0].order);
    const auto p2 = static_cast<Eigen::Index>(s[1].order);
    const Eigen::Index n = p1 + p2;

    std::vector<Eigen::VectorXcd> weights(2, Eigen::VectorXcd::Zero(n));
    for (int c = 1; c <= 2; ++c) {
        auto& w = weights[static_cast<std::size_t>(c - 1)];
        w.head(p1) = ma_at_eigenvalues(s[0], spec.b(c, 1));
        w.tail(p2) = ma_at_eigenvalues(s[1], spec.b(c, 2));
    }
    std::vector<Eigen::VectorXcd> jumps(2, Eigen::VectorXcd::Zero(n));
    jumps[0].head(p1) = s[0].sinv_e;
    jumps[1].tail(p2) = s[1].sinv_e;

    const double row = norm_of_sum_row(s[0], add(spec.b11, spec.b21), s[1], add(spec.b12, spec.b22));
    std::vector<double> k{row * s[0].sinv_e.norm(), row * s[1].sinv_e.norm()};

    std::vector<ModalProcess::Block> blocks{{0, s[0]}, {p1, s[1]}};
    return ModalProcess(std::move(blocks), {spec.mu[0], spec.mu[1]}, std::move(weights), std::move(jumps),
                        std::move(k));
}

}  // namespace

UnivariateSpec make_univariate_spec(double mu, std::vector<double> a, std::vector<double> b) {
    require_positive_mu(mu);
    UnivariateSpec spec;
    spec.mu = mu;
    spec.a = PolyCoeffs(std::move(a));
    spec.q = pad_ma(b, spec.a.order(), "MA vector b");
    if (!(b[0] > 0.0)) {
        throw InvalidSpec("leading MA coefficient b_0 must be positive");
    }
    spec.b = std::move(b);
    return spec;
}

const std::vector<double>& BivariateSpec::b(int channel, int mark) const {
    if (channel == 1) return mark == 1 ? b11 : b12;
    return mark == 1 ? b21 : b22;
}

BivariateSpec make_bivariate_spec(std::array<double, 2> mu, std::vector<double> a1, std::vector<double> a2,
                                  std::vector<double> b11, std::vector<double> b12, std::vector<double> b21,
                                  std::vector<double> b22) {
    require_positive_mu(mu[0]);
    require_positive_mu(mu[1]);
    BivariateSpec spec;
    spec.mu = mu;
    spec.a1 = PolyCoeffs(std::move(a1));
    spec.a2 = PolyCoeffs(std::move(a2));
    spec.q[0] = pad_ma(b11, spec.a1.order(), "b11");
    spec.q[1] = pad_ma(b12, spec.a2.order(), "b12");
    spec.q[2] = pad_ma(b21, spec.a1.order(), "b21");
    spec.q[3] = pad_ma(b22, spec.a2.order(), "b22");
    spec.b11 = std::move(b11);
    spec.b12 = std::move(b12);
    spec.b21 = std::move(b21);
    spec.b22 = std::move(b22);
    return spec;
}

std::uint64_t spec_hash(const UnivariateSpec& spec) {
    Fnv1a h;
    h.add("univariate;");
    h.add(spec.mu);
    h.add(spec.a.values());
    h.add(spec.b);
    return h.value();
}

std::uint64_t spec_hash(const BivariateSpec& spec) {
    Fnv1a h;
    h.add("bivariate;");
    h.add(spec.mu[0]);
    h.add(spec.mu[1]);
    h.add(spec.a1.values());
    h.add(spec.a2.values());
    h.add(spec.b11);
    h.add(spec.b12);
    h.add(spec.b21);
    h.add(spec.b22);
    return h.value();
}

std::uint64_t spec_hash(const ModelSpec& spec) {
    return std::visit([](const auto& s) { return spec_hash(s); }, spec);
}

// ---------------------------------------------------------------------------

ModalProcess::ModalProcess(std::vector<Block> blocks, std::vector<double> mu, std::vector<Eigen::VectorXcd> weights,
                           std::vector<Eigen::VectorXcd> jumps, std::vector<double> bound_jump)
    : blocks_(std::move(blocks)),
      mu_(std::move(mu)),
      weights_(std::move(weights)),
      jumps_(std::move(jumps)),
      bound_jump_(std::move(bound_jump)) {
    Eigen::Index n = 0;
    for (const auto& b : blocks_) n += static_cast<Eigen::Index>(b.spectral.order);
    eigenvalues_.resize(n);
    decay_ = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) {
        eigenvalues_.segment(b.offset, static_cast<Eigen::Index>(b.spectral.order)) = b.spectral.eigenvalues;
        decay_ = std::max(decay_, b.spectral.decay);
    }
    for (double m : mu_) base_ += m;
}

ProcessState ModalProcess::initial_state() const {
    return {Eigen::VectorXcd::Zero(eigenvalues_.size()), 0.0};
}

double ModalProcess::channel_intensity(const ProcessState& state, std::size_t channel, double t) const {
    const double dt = t - state.last_event_time;
    const auto& w = weights_[channel];
    Complex acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) {
        acc += w[j] * state.modes[j] * std::exp(eigenvalues_[j] * dt);
    }
    return mu_[channel] + acc.real();
}

ProcessState ModalProcess::apply_event(const ProcessState& state, double t, std::size_t mark) const {
    const double dt = t - state.last_event_time;
    ProcessState next;
    next.modes.resize(eigenvalues_.size());
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) {
        next.modes[j] = state.modes[j] * std::exp(eigenvalues_[j] * dt) + jumps_[mark][j];
    }
    next.last_event_time = t;
    return next;
}

double ModalProcess::compensator_increment(const ProcessState& state, std::size_t channel, double t0,
                                           double t1) const {
    const double lead = t0 - state.last_event_time;
    const double span = t1 - t0;
    const auto& w = weights_[channel];
    Complex acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) {
        const Complex l = eigenvalues_[j];
        const Complex c = w[j] * state.modes[j] * std::exp(l * lead);
        if (std::abs(l) * span < 1e-300) {
            acc += c * span;
        } else {
            acc += c * expm1(l * span) / l;
        }
    }
    return mu_[channel] * span + acc.real();
}

Eigen::VectorXd ModalProcess::state_vector(const ProcessState& state) const {
    Eigen::VectorXd x(eigenvalues_.size());
    for (const auto& b : blocks_) {
        const auto p = static_cast<Eigen::Index>(b.spectral.order);
        x.segment(b.offset, p) = from_modal(b.spectral, state.modes.segment(b.offset, p)).real();
    }
    return x;
}

// ---------------------------------------------------------------------------

UnivariateModel::UnivariateModel(UnivariateSpec spec)
    : spec_(std::move(spec)),
      spectral_(spectral_decompose(spec_.a)),
      report_(validate(spec_)),
      process_(build_univariate_process(spec_, spectral_)),
      hash_(spec_hash(spec_)) {}

BoundConstantForms UnivariateModel::bound_constant_forms() const {
    return carma_hawkes::bound_constant_forms(spectral_, spec_.b);
}

double UnivariateModel::kernel_value(double t) const {
    return kernel_from_spectrum(spectral_, spec_.b, t);
}

double UnivariateModel::intensity_at(const ProcessState& state, double t) const {
    const double lambda = process_.channel_intensity(state, 0, t);
    if (report_.admissible() && lambda < spec_.mu - 1e-9) {
        std::ostringstream msg;
        msg << "intensity " << lambda << " below baseline " << spec_.mu << " at t=" << t;
        throw NegativeIntensity(msg.str());
    }
    return lambda;
}

ProcessState UnivariateModel::apply_event(const ProcessState& state, double t) const {
    return process_.apply_event(state, t, 0);
}

double UnivariateModel::compensator_increment(const ProcessState& state, double t0, double t1) const {
    return process_.compensator_increment(state, 0, t0, t1);
}

double UnivariateModel::stationary_rate() const {
    const double br = report_.branching;
    if (!(br < 1.0)) return std::numeric_limits<double>::infinity();
    return spec_.mu / (1.0 - br);
}

BivariateModel::BivariateModel(BivariateSpec spec)
    : spec_(std::move(spec)),
      spectral_{spectral_decompose(spec_.a1), spectral_decompose(spec_.a2)},
      report_(validate(spec_)),
      process_(build_bivariate_process(spec_, spectral_)),
      hash_(spec_hash(spec_)) {
    for (int mark = 1; mark <= 2; ++mark) {
        const auto forms = bound_constant_forms(mark);
        const double scale = std::max(std::abs(forms.spectral), std::abs(forms.norm_product));
        if (std::abs(forms.spectral - forms.norm_product) > 1e-8 * scale) {
            std::ostringstream msg;
            msg << "bound constant routes disagree for mark " << mark << ": " << forms.norm_product << " vs "
                << forms.spectral;
            throw SpectralError(msg.str());
        }
    }
}

BoundConstantForms BivariateModel::bound_constant_forms(int mark) const {
    // Materialised route: block-diagonal S, the row 1^T B and a linear solve
    // for the mark's column of S^{-1} E.
    const auto p1 = static_cast<Eigen::Index>(spectral_[0].order);
    const auto p2 = static_cast<Eigen::Index>(spectral_[1].order);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(p1 + p2, p1 + p2);
    s.topLeftCorner(p1, p1) = vandermonde(spectral_[0]);
    s.bottomRightCorner(p2, p2) = vandermonde(spectral_[1]);
    Eigen::RowVectorXcd ones_b(p1 + p2);
    for (Eigen::Index i = 0; i < p1; ++i) {
        ones_b[i] = spec_.b11[static_cast<std::size_t>(i)] + spec_.b21[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index i = 0; i < p2; ++i) {
        ones_b[p1 + i] = spec_.b12[static_cast<std::size_t>(i)] + spec_.b22[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(p1 + p2);
    e[mark == 1 ? p1 - 1 : p1 + p2 - 1] = 1.0;
    const Eigen::VectorXcd col = s.partialPivLu().solve(e);

    BoundConstantForms forms;
    forms.norm_product = (ones_b * s).norm() * col.norm();
    forms.spectral = bound_constant(mark);
    return forms;
}

double BivariateModel::kernel_value(int channel, int mark, double t) const {
    return kernel_from_spectrum(spectral_[static_cast<std::size_t>(mark - 1)], spec_.b(channel, mark), t);
}

std::array<double, 2> BivariateModel::intensity_at(const ProcessState& state, double t) const {
    std::array<double, 2> out{process_.channel_intensity(state, 0, t), process_.channel_intensity(state, 1, t)};
    if (report_.admissible()) {
        for (std::size_t c = 0; c < 2; ++c) {
            if (out[c] < spec_.mu[c] - 1e-9) {
                std::ostringstream msg;
                msg << "intensity of component " << c + 1 << " is " << out[c] << ", below baseline at t=" << t;
                throw NegativeIntensity(msg.str());
            }
        }
    }
    return out;
}

ProcessState BivariateModel::apply_event(const ProcessState& state, double t, int mark) const {
    if (mark != 1 && mark != 2) throw std::out_of_range("mark must be 1 or 2");
    return process_.apply_event(state, t, static_cast<std::size_t>(mark - 1));
}

double BivariateModel::compensator_increment(const ProcessState& state, double t0, double t1, int component) const {
    if (component != 1 && component != 2) throw std::out_of_range("component must be 1 or 2");
    return process_.compensator_increment(state, static_cast<std::size_t>(component - 1), t0, t1);
}

std::array<double, 2> BivariateModel::stationary_rates() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!report_.branching_matrix || !(report_.branching < 1.0)) return {inf, inf};
    const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() - *report_.branching_matrix;
    const Eigen::Vector2d rates = m.inverse() * Eigen::Vector2d(spec_.mu[0], spec_.mu[1]);
    return {rates[0], rates[1]};
}

Model make_model(const ModelSpec& spec) {
    if (const auto* u = std::get_if<UnivariateSpec>(&spec)) {
        return Model(std::in_place_type<UnivariateModel>, *u);
    }
    return Model(std::in_place_type<BivariateModel>, std::get<BivariateSpec>(spec));
}

}  // namespace carma_hawkes
