#include <cmath>

#include "curos/errors.hpp"
#include "curos/models.hpp"

namespace curos::models {

Matrix se_kernel(const Vector& x, double ell) {
    if (!(ell > 0.0)) throw ArgumentError("se_kernel: length scale must be positive");
    const Index n = x.size();
    Matrix K(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double dx = x(i) - x(j);
            K(i, j) = std::exp(-dx * dx / (2.0 * ell * ell));
        }
    return K;
}

KlModes se_kernel_kl(const Vector& x, double ell, Index d) {
    if (d < 1 || d > x.size()) throw ArgumentError("se_kernel_kl: need 1 <= d <= n");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(se_kernel(x, ell));
    const Index n = x.size();
    KlModes out;
    out.lambda.resize(d);
    out.psi.resize(n, d);
    for (Index k = 0; k < d; ++k) {
        // Eigen returns ascending eigenvalues; round-off negatives are clamped.
        out.lambda(k) = std::max(0.0, eig.eigenvalues()(n - 1 - k));
        Vector v = eig.eigenvectors().col(n - 1 - k);
        Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        out.psi.col(k) = v;
    }
    return out;
}

} // namespace curos::models
