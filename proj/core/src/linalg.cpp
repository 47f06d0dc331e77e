#include "curos/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "curos/errors.hpp"

namespace curos::linalg {

QrResult thin_qr(const Matrix& A) {
    const Index n = A.rows();
    const Index r = A.cols();
    if (n < r) throw ArgumentError("thin_qr: need rows >= cols");

    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
    Matrix R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();

    // Fix the sign convention so the factorisation is unique for full-rank input.
    for (Index k = 0; k < r; ++k) {
        if (R(k, k) < 0.0) {
            R.row(k) *= -1.0;
            Q.col(k) *= -1.0;
        }
    }
    return {std::move(Q), std::move(R)};
}

namespace {

struct SvdParts {
    Matrix U;
    Vector S;
    Matrix V;
};

// Jacobi is used for small problems: it resolves tiny singular values to high
// relative accuracy, which the toy sweeps probe down to ~1e-16. BDC handles
// larger matrices.
SvdParts svd_impl(const Matrix& A, bool vectors) {
    const unsigned opts = vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
    if (std::min(A.rows(), A.cols()) <= 160) {
        Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(A, opts);
        if (vectors) return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
        return {Matrix(), svd.singularValues(), Matrix()};
    }
    Eigen::BDCSVD<Matrix> svd(A, opts);
    if (vectors) return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
    return {Matrix(), svd.singularValues(), Matrix()};
}

} // namespace

TruncatedSvd svd_truncated(const Matrix& A, Index r) {
    if (r < 0 || r > std::min(A.rows(), A.cols()))
        throw ArgumentError("svd_truncated: rank exceeds min(n, s)");
    auto svd = svd_impl(A, true);
    return {svd.U.leftCols(r), svd.S.head(r), svd.V.leftCols(r)};
}

Vector singular_values(const Matrix& A) {
    if (A.size() == 0) return Vector();
    return svd_impl(A, false).S;
}

Matrix pinv(const Matrix& A, std::optional<double> tol) {
    if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());
    const double rel = tol.value_or(std::numeric_limits<double>::epsilon() *
                                    static_cast<double>(std::max(A.rows(), A.cols())));
    if (rel < 0.0) throw ArgumentError("pinv: negative tolerance");

    const auto svd = svd_impl(A, true);
    const Vector& sv = svd.S;
    const double cutoff = rel * (sv.size() ? sv(0) : 0.0);
    Vector inv = Vector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
    return svd.V * inv.asDiagonal() * svd.U.transpose();
}

double spectral_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    return svd_impl(A, false).S(0);
}

double smallest_singular_value(const Matrix& A) {
    if (A.rows() < A.cols() || A.size() == 0) return 0.0;
    const Vector sv = svd_impl(A, false).S;
    return sv(sv.size() - 1);
}

Matrix expm_skew(const Matrix& W) {
    if (W.rows() != W.cols()) throw ArgumentError("expm_skew: matrix must be square");
    const double norm = W.norm();
    if ((W + W.transpose()).norm() > 1e-12 * norm)
        throw ArgumentError("expm_skew: input is not skew-symmetric");
    if (norm == 0.0) return Matrix::Identity(W.rows(), W.cols());
    return W.exp();
}

double orthonormality_defect(const Matrix& Q) {
    return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).norm();
}

Matrix selector(const IndexSet& p) {
    Matrix P = Matrix::Zero(p.ambient(), p.size());
    for (Index k = 0; k < p.size(); ++k) P(p[k], k) = 1.0;
    return P;
}

} // namespace curos::linalg
