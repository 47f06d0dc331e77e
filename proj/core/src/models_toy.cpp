#include <cmath>
#include <numbers>

#include "curos/errors.hpp"
#include "curos/models.hpp"
#include "curos/rng.hpp"

namespace curos::models {

Vector toy_decay(Index n, Decay decay) {
    if (n < 1) throw ArgumentError("toy_decay: n must be positive");
    Vector d(n);
    for (Index i = 0; i < n; ++i) {
        const double k = static_cast<double>(i + 1);
        d(i) = decay == Decay::fast ? std::ldexp(1.0, -static_cast<int>(i + 1)) : 1.0 / (k * k * k);
    }
    return d;
}

Matrix toy_matrix(const ToySpec& spec) {
    if (spec.n < 2) throw ArgumentError("toy_matrix: n must be at least 2");
    const Index n = spec.n;
    Rng rng(spec.seed);
    auto skew = [&] {
        Matrix W(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) W(i, j) = rng.uniform();
        return Matrix(0.5 * (W - W.transpose()));
    };
    const Matrix W1 = skew();
    const Matrix W2 = skew();
    const Vector d = toy_decay(n, spec.decay);
    return linalg::expm_skew(W1) * (std::numbers::e * d).asDiagonal() * linalg::expm_skew(W2).transpose();
}

} // namespace curos::models
