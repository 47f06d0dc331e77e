#include <cmath>
#include <random>

#include "doctest.h"

#include "curos/errors.hpp"
#include "curos/linalg.hpp"
#include "curos/sampling.hpp"

using namespace curos;

namespace {

Matrix orthonormal(Index n, Index r, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> N;
    Matrix A(n, r);
    for (Index j = 0; j < r; ++j)
        for (Index i = 0; i < n; ++i) A(i, j) = N(g);
    return linalg::thin_qr(A).Q;
}

double abs_det_rows(const Matrix& U, const IndexSet& p) {
    return std::abs(linalg::select_rows(U, p).determinant());
}

} // namespace

TEST_CASE("deim and qdeim on a hand-worked 3 x 2 basis") {
    Matrix U(3, 2);
    U << 1, 2, 3, 1, 2, 4;
    // DEIM: argmax |u1| = 1; residual of u2 is (5/3, 0, 10/3) -> 2.
    CHECK(sampling::deim(U) == IndexSet({1, 2}, 3));
    // QDEIM: rows as columns of U^T; norms^2 5, 10, 20 -> 2 first, then the
    // residual of row 1 is (2, -1) while row 0 becomes 0 -> 1.
    CHECK(sampling::qdeim(U) == IndexSet({2, 1}, 3));
}

TEST_CASE("deim reports a degenerate basis") {
    Matrix U(3, 2);
    U << 1, 2, 0, 0, 0, 0;
    CHECK_THROWS_AS(sampling::deim(U), DegeneracyError);
}

TEST_CASE("maxvol selection is swap-stable and at least as large as qdeim") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix U = orthonormal(30, 4, seed);
        const sampling::MaxvolOptions opts;
        const IndexSet p = sampling::maxvol(U, opts);
        const double vol = abs_det_rows(U, p);
        CHECK(vol >= abs_det_rows(U, sampling::qdeim(U)) * (1 - 1e-12));
        for (Index i = 0; i < U.rows(); ++i) {
            if (p.contains(i)) continue;
            for (Index k = 0; k < p.size(); ++k) {
                std::vector<Index> q(p.begin(), p.end());
                q[static_cast<std::size_t>(k)] = i;
                CHECK(abs_det_rows(U, IndexSet(q, U.rows())) <= opts.swap_tol * vol * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("gpode starts with qdeim, is nested and greedy in sigma_min") {
    const Matrix U = orthonormal(25, 3, 11);
    const IndexSet full = sampling::gpode(U, 10);
    CHECK(full.prefix(3) == sampling::qdeim(U));
    for (Index k = 3; k <= 9; ++k) CHECK(sampling::gpode(U, k) == full.prefix(k));
    for (Index k = 3; k < 10; ++k) {
        const IndexSet sel = full.prefix(k);
        double best = -1.0;
        for (Index i = 0; i < U.rows(); ++i) {
            if (sel.contains(i)) continue;
            IndexSet trial = sel;
            trial.push_back(i);
            best = std::max(best, linalg::smallest_singular_value(linalg::select_rows(U, trial)));
        }
        const double got = linalg::smallest_singular_value(linalg::select_rows(U, full.prefix(k + 1)));
        CHECK(got >= best * (1 - 1e-10));
    }
    CHECK(sampling::gpode(U, 25).size() == 25);
}

TEST_CASE("GreedyOversampler agrees with gpode_extend and reports pinv norms") {
    const Matrix U = orthonormal(20, 4, 5);
    const IndexSet seed({7, 2, 13, 0}, 20);
    sampling::GreedyOversampler g(U, seed);
    const IndexSet ext = sampling::gpode_extend(U, seed, 9);
    CHECK(g.first(9) == ext);
    CHECK(ext.prefix(4) == seed);
    for (Index k = 4; k <= 9; ++k) {
        const double direct = 1.0 / linalg::smallest_singular_value(linalg::select_rows(U, ext.prefix(k)));
        CHECK(g.pinv_norm(k) == doctest::Approx(direct).epsilon(1e-10));
    }
    // Every row selected: U is orthonormal, so the pseudoinverse norm is 1.
    CHECK(g.pinv_norm(20) == doctest::Approx(1.0).epsilon(1e-12));
}
