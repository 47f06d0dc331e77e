#pragma once

// Dense kernels shared by every other module. All functions are pure.
// Matrices are Eigen column-major doubles project-wide.

#include <optional>

#include <Eigen/Dense>

#include "curos/index_set.hpp"

namespace curos {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

struct QrResult {
    Matrix Q; // n x r, orthonormal columns
    Matrix R; // r x r, upper triangular, non-negative diagonal
};

struct TruncatedSvd {
    Matrix U;     // n x r
    Vector sigma; // length r, descending
    Matrix V;     // s x r
};

// Householder thin QR of a tall matrix. Rank deficiency is tolerated (zero
// diagonal entries in R); Q stays orthonormal regardless.
QrResult thin_qr(const Matrix& A);

// Rank-r truncated SVD; throws ArgumentError when r > min(n, s) or r < 0.
TruncatedSvd svd_truncated(const Matrix& A, Index r);

// All singular values, descending.
Vector singular_values(const Matrix& A);

// Moore-Penrose pseudoinverse. Singular values below tol * sigma_max are
// dropped; the default tol is machine epsilon * max(n, s).
Matrix pinv(const Matrix& A, std::optional<double> tol = std::nullopt);

// Largest singular value (0 for empty or zero matrices).
double spectral_norm(const Matrix& A);

// Smallest singular value of a tall (or square) matrix; 0 when it has fewer
// rows than columns.
double smallest_singular_value(const Matrix& A);

// exp(W) for skew-symmetric W. Throws ArgumentError unless
// ||W + W^T||_F <= 1e-12 ||W||_F.
Matrix expm_skew(const Matrix& W);

// ||Q^T Q - I||_F
double orthonormality_defect(const Matrix& Q);

inline Matrix select_rows(const Matrix& A, const IndexSet& p) { return A(p.indices(), Eigen::all); }
inline Matrix select_cols(const Matrix& A, const IndexSet& s) { return A(Eigen::all, s.indices()); }
inline Matrix select(const Matrix& A, const IndexSet& p, const IndexSet& s) {
    return A(p.indices(), s.indices());
}

// Column selector I_n(:, p).
Matrix selector(const IndexSet& p);

} // namespace linalg
} // namespace curos
