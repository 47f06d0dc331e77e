#include <cmath>
#include <numbers>

#include "curos/errors.hpp"
#include "curos/models.hpp"
#include "curos/rng.hpp"

namespace curos::models {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpdeKind parse_spde_kind(const std::string& name) {
    if (name == "burgers") return SpdeKind::burgers;
    if (name == "allen_cahn" || name == "allen-cahn") return SpdeKind::allen_cahn;
    if (name == "kdv") return SpdeKind::kdv;
    throw ArgumentError("unknown SPDE kind '" + name + "'");
}

std::string to_string(SpdeKind kind) {
    switch (kind) {
    case SpdeKind::burgers: return "burgers";
    case SpdeKind::allen_cahn: return "allen_cahn";
    case SpdeKind::kdv: return "kdv";
    }
    return "unknown";
}

SpdeSpec SpdeSpec::desk(SpdeKind kind) {
    SpdeSpec s;
    s.kind = kind;
    switch (kind) {
    case SpdeKind::burgers:
        s.n = 101, s.s = 64, s.d = 4, s.coeff = 2.5e-3, s.dt = 1e-3, s.t_final = 1.0;
        break;
    case SpdeKind::allen_cahn:
        s.n = 128, s.s = 64, s.d = 4, s.coeff = 5e-3, s.dt = 1e-2, s.t_final = 5.0;
        break;
    case SpdeKind::kdv:
        s.n = 512, s.s = 32, s.d = 4, s.coeff = 2e-4, s.dt = 1e-4, s.t_final = 0.1;
        break;
    }
    return s;
}

SpdeSpec SpdeSpec::reference(SpdeKind kind) {
    SpdeSpec s;
    s.kind = kind;
    switch (kind) {
    case SpdeKind::burgers:
        s.n = 401, s.s = 256, s.d = 17, s.coeff = 2.5e-3, s.dt = 2.5e-4, s.t_final = 5.0;
        break;
    case SpdeKind::allen_cahn:
        s.n = 256, s.s = 256, s.d = 4, s.coeff = 5e-3, s.dt = 1e-2, s.t_final = 50.0;
        break;
    case SpdeKind::kdv:
        s.n = 1024, s.s = 256, s.d = 4, s.coeff = 2e-4, s.dt = 1e-4, s.t_final = 1.0;
        break;
    }
    return s;
}

double SpdeSpec::domain_length() const {
    switch (kind) {
    case SpdeKind::burgers: return 1.0;
    case SpdeKind::allen_cahn: return 2.0 * kPi;
    case SpdeKind::kdv: return 10.0;
    }
    return 1.0;
}

void SpdeSpec::validate() const {
    const Index min_n = kind == SpdeKind::kdv ? 5 : 3;
    if (n < min_n) throw ArgumentError("SpdeSpec: grid too small for the stencil");
    if (s < 1 || d < 1 || d > n) throw ArgumentError("SpdeSpec: need s >= 1 and 1 <= d <= n");
    if (!std::isfinite(coeff) || !std::isfinite(sigma) || !std::isfinite(ell) || !(dt > 0.0) || !(t_final > 0.0))
        throw ArgumentError("SpdeSpec: parameters must be finite with dt, t_final > 0");
}

SpdeModel::SpdeModel(const SpdeSpec& spec) : StencilOracle(spec.n, spec.s), spec_(spec) {
    spec_.validate();
    const Index n = spec_.n;
    x_.resize(n);
    if (spec_.kind == SpdeKind::burgers) {
        h_ = 1.0 / static_cast<double>(n - 1);
    } else {
        h_ = spec_.domain_length() / static_cast<double>(n);
    }
    for (Index i = 0; i < n; ++i) x_(i) = h_ * static_cast<double>(i);

    kl_ = se_kernel_kl(x_, spec_.length_scale(), spec_.d);
    field_weights_ = spec_.kind == SpdeKind::burgers ? Vector(kl_.lambda.cwiseSqrt()) : kl_.lambda;

    Rng rng(spec_.seed);
    xi_.resize(spec_.d, spec_.s);
    for (Index j = 0; j < spec_.s; ++j)
        for (Index k = 0; k < spec_.d; ++k) xi_(k, j) = rng.normal();
}

Matrix SpdeModel::initial_full() const {
    const Index n = spec_.n;
    // Random field: sum_k w_k psi_k(x) xi_k for every sample.
    const Matrix field = kl_.psi * field_weights_.asDiagonal() * xi_;
    Matrix A(n, spec_.s);
    for (Index i = 0; i < n; ++i) {
        const double x = x_(i);
        for (Index j = 0; j < spec_.s; ++j) {
            const double noise = spec_.sigma * field(i, j);
            switch (spec_.kind) {
            case SpdeKind::burgers:
                A(i, j) = std::sin(2.0 * kPi * x) * (0.5 * (std::exp(std::cos(2.0 * kPi * x)) - 1.5) + noise);
                break;
            case SpdeKind::allen_cahn:
                A(i, j) = std::exp(-27.0 * (x - 4.2) * (x - 4.2)) - std::exp(-23.5 * (x - kPi / 2) * (x - kPi / 2)) +
                          std::exp(-38.0 * (x - 5.4) * (x - 5.4)) + std::tanh(2.0 * std::sin(x)) / 3.0 + noise;
                break;
            case SpdeKind::kdv: {
                const double c0 = std::cosh(20.0);
                const double c = std::cosh(20.0 * (x - 2.0));
                A(i, j) = std::log(1.0 + (c0 * c0) / (c * c)) / 40.0 + noise;
                break;
            }
            }
        }
    }
    if (spec_.kind == SpdeKind::burgers) A.row(n - 1).setZero(); // sin(2 pi) rounding
    return A;
}

double SpdeModel::boundary_value(double t, Index j) const {
    double v = -std::sin(2.0 * kPi * t);
    for (Index k = 0; k < spec_.d; ++k) {
        const double i = static_cast<double>(k + 1);
        v += spec_.sigma * std::sin(i * kPi * t) * xi_(k, j) * t / (i * i);
    }
    return v;
}

double SpdeModel::boundary_rate(double t, Index j) const {
    double v = -2.0 * kPi * std::cos(2.0 * kPi * t);
    for (Index k = 0; k < spec_.d; ++k) {
        const double i = static_cast<double>(k + 1);
        v += spec_.sigma * xi_(k, j) * (i * kPi * std::cos(i * kPi * t) * t + std::sin(i * kPi * t)) / (i * i);
    }
    return v;
}

Index SpdeModel::wrap(Index i) const {
    const Index n = spec_.n;
    return ((i % n) + n) % n;
}

Index SpdeModel::stencil_width() const { return spec_.kind == SpdeKind::kdv ? 5 : 3; }

void SpdeModel::stencil(Index i, std::vector<Index>& out) const {
    out.clear();
    switch (spec_.kind) {
    case SpdeKind::burgers:
        if (i == 0 || i == spec_.n - 1) return;
        out = {i - 1, i, i + 1};
        return;
    case SpdeKind::allen_cahn:
        out = {wrap(i - 1), i, wrap(i + 1)};
        return;
    case SpdeKind::kdv:
        out = {wrap(i - 2), wrap(i - 1), i, wrap(i + 1), wrap(i + 2)};
        return;
    }
}

double SpdeModel::kernel(Index i, Index j, double t, std::span<const double> v) const {
    const double h = h_;
    const double c = spec_.coeff;
    switch (spec_.kind) {
    case SpdeKind::burgers: {
        if (i == 0) return boundary_rate(t, j);
        if (i == spec_.n - 1) return 0.0;
        const double flux = (v[2] * v[2] - v[0] * v[0]) / (4.0 * h);
        return -flux + c * (v[2] - 2.0 * v[1] + v[0]) / (h * h);
    }
    case SpdeKind::allen_cahn: {
        const double u = v[1];
        return c * (v[2] - 2.0 * u + v[0]) / (h * h) - u * u * u + u;
    }
    case SpdeKind::kdv: {
        const double ux = (v[3] - v[1]) / (2.0 * h);
        const double uxxx = (v[4] - 2.0 * v[3] + 2.0 * v[1] - v[0]) / (2.0 * h * h * h);
        return -v[2] * ux + c * uxxx;
    }
    }
    return 0.0;
}

} // namespace curos::models
