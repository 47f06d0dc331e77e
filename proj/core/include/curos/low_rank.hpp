#pragma once

#include "curos/index_set.hpp"
#include "curos/linalg.hpp"

namespace curos {

// A_hat = U diag(sigma) Y^T with orthonormal U (n x r), Y (s x r) and
// sigma >= 0 descending.
struct LowRankState {
    Matrix U;
    Vector sigma;
    Matrix Y;

    Index rank() const noexcept { return sigma.size(); }
    Index rows() const noexcept { return U.rows(); }
    Index cols() const noexcept { return Y.rows(); }

    // Entry access through the factors; none of these form the n x s matrix
    // except materialize().
    Matrix block(const IndexSet& p, const IndexSet& s) const;
    Matrix row_block(const IndexSet& p) const;
    Matrix col_block(const IndexSet& s) const;
    Matrix materialize() const;

    // Per-thread count of materialize() calls; lets CUR paths assert that
    // they never form the dense state.
    static long long materialize_calls() noexcept;

    // Leading-k truncation.
    LowRankState truncated(Index k) const;

    // Largest violation of the orthonormality / ordering invariants.
    double invariant_defect() const;

    // Rank-r truncated SVD of a dense matrix.
    static LowRankState from_matrix(const Matrix& A, Index r);
};

} // namespace curos
