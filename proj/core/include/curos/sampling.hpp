#pragma once

// Row-index selection on basis matrices. Column selection is the same call on
// the right basis. All selectors are deterministic: argmax ties go to the
// lowest index.

#include <vector>

#include "curos/index_set.hpp"
#include "curos/linalg.hpp"

namespace curos::sampling {

// Greedy DEIM interpolation points. Throws DegeneracyError when the
// interpolation subsystem becomes singular.
IndexSet deim(const Matrix& U);

// First r pivots of the column-pivoted QR of U^T.
IndexSet qdeim(const Matrix& U);

struct MaxvolOptions {
    int max_iters = 100;
    double swap_tol = 1.01;
};

// Row-swap maximum-volume search started from the QDEIM rows.
IndexSet maxvol(const Matrix& U, const MaxvolOptions& opts = {});

// Oversampled selection of k >= r rows: the first r are qdeim(U), the rest are
// added one at a time, each maximising sigma_min(U(selected, :)).
IndexSet gpode(const Matrix& U, Index k);

// Same greedy, but continuing from a prescribed seed. While fewer than
// cols(U) rows are selected the continuation uses pivoted-QR steps.
IndexSet gpode_extend(const Matrix& U, const IndexSet& seed, Index k);

// Incremental form of gpode_extend. Selections are nested, so growing from k
// to k + 1 reuses all previous work.
class GreedyOversampler {
public:
    explicit GreedyOversampler(const Matrix& U);
    GreedyOversampler(const Matrix& U, const IndexSet& seed);

    // Returns the first k selected indices, extending the selection if needed.
    IndexSet first(Index k);

    // ||pinv(U(first(k), :))||_2 = 1 / sigma_min, +inf when rank deficient.
    double pinv_norm(Index k);

    Index ambient() const noexcept { return U_.rows(); }

private:
    void add(Index i);
    Index next_pivoted_qr() const;
    Index next_sigma_min();

    Matrix U_;
    std::vector<Index> selected_;
    std::vector<char> taken_;
    Matrix residual_;  // rows of U minus their projection on the selected rows
    Matrix gram_;      // U(selected,:)^T U(selected,:)
};

} // namespace curos::sampling
