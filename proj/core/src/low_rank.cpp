#include "curos/low_rank.hpp"

#include <algorithm>

#include "curos/errors.hpp"

namespace curos {

Matrix LowRankState::block(const IndexSet& p, const IndexSet& s) const {
    return U(p.indices(), Eigen::all) * sigma.asDiagonal() * Y(s.indices(), Eigen::all).transpose();
}

Matrix LowRankState::row_block(const IndexSet& p) const {
    return U(p.indices(), Eigen::all) * sigma.asDiagonal() * Y.transpose();
}

Matrix LowRankState::col_block(const IndexSet& s) const {
    return U * sigma.asDiagonal() * Y(s.indices(), Eigen::all).transpose();
}

namespace {
thread_local long long g_materialized = 0;
}

Matrix LowRankState::materialize() const {
    ++g_materialized;
    return U * sigma.asDiagonal() * Y.transpose();
}

long long LowRankState::materialize_calls() noexcept { return g_materialized; }

LowRankState LowRankState::truncated(Index k) const {
    if (k < 0 || k > rank()) throw ArgumentError("LowRankState::truncated: bad rank");
    return {U.leftCols(k), sigma.head(k), Y.leftCols(k)};
}

double LowRankState::invariant_defect() const {
    double d = std::max(linalg::orthonormality_defect(U), linalg::orthonormality_defect(Y));
    for (Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) < 0.0) d = std::max(d, -sigma(i));
        if (i > 0 && sigma(i) > sigma(i - 1)) d = std::max(d, sigma(i) - sigma(i - 1));
    }
    return d;
}

LowRankState LowRankState::from_matrix(const Matrix& A, Index r) {
    auto svd = linalg::svd_truncated(A, r);
    return {std::move(svd.U), std::move(svd.sigma), std::move(svd.V)};
}

} // namespace curos
