#include "curos/sampling.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "curos/errors.hpp"

namespace curos::sampling {

namespace {

Index argmax_abs(const Eigen::Ref<const Vector>& v) {
    Index best = 0;
    double best_val = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_val) {
            best_val = a;
            best = i;
        }
    }
    return best;
}

void require_tall(const Matrix& U, const char* who) {
    if (U.cols() < 1 || U.rows() < U.cols())
        throw ArgumentError(std::string(who) + ": need rows >= cols >= 1");
}

// Smallest eigenvalue of diag(lambda) + w w^T, lambda ascending. The root of
// the secular equation 1 + sum w_i^2 / (lambda_i - x) lies in
// [lambda_0, min(lambda_1, lambda_0 + |w|^2)].
double min_eig_rank_one_update(const Vector& lambda, const Vector& w) {
    // Smallest root of 1 + sum w_i^2 / (lambda_i - mu), increasing on
    // (lambda_0, min(lambda_0 + |w|^2, lambda_1)). Newton, with bisection
    // whenever the step leaves the bracket.
    double lo = lambda(0);
    double hi = lo + w.squaredNorm();
    if (lambda.size() > 1) hi = std::min(hi, lambda(1));
    if (!(hi > lo)) return lo;
    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = 1.0, df = 0.0;
        for (Index i = 0; i < lambda.size(); ++i) {
            const double q = w(i) / (lambda(i) - mu);
            f += w(i) * q;
            df += q * q;
        }
        if (f < 0.0)
            lo = mu;
        else
            hi = mu;
        double next = df > 0.0 ? mu - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == mu || !(hi > lo)) break;
        const double step = std::abs(next - mu);
        mu = next;
        if (step <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(mu)) break;
    }
    return mu;
}

} // namespace

IndexSet deim(const Matrix& U) {
    require_tall(U, "deim");
    const Index n = U.rows();
    const Index r = U.cols();
    std::vector<Index> p;
    p.reserve(static_cast<std::size_t>(r));
    p.push_back(argmax_abs(U.col(0)));

    for (Index l = 1; l < r; ++l) {
        const Matrix Up = U(p, Eigen::seqN(0, l));
        Eigen::PartialPivLU<Matrix> lu(Up);
        const double scale = Up.cwiseAbs().maxCoeff();
        const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (!(min_pivot > 1e-14 * scale))
            throw DegeneracyError("deim: singular interpolation system at step " + std::to_string(l),
                                  std::numeric_limits<double>::infinity());
        const Vector c = lu.solve(Vector(U(p, l)));
        const Vector res = U.col(l) - U.leftCols(l) * c;
        const Index next = argmax_abs(res);
        if (!(std::abs(res(next)) > 0.0))
            throw DegeneracyError("deim: dependent basis column " + std::to_string(l),
                                  std::numeric_limits<double>::infinity());
        p.push_back(next);
    }
    return IndexSet(std::move(p), n);
}

IndexSet qdeim(const Matrix& U) {
    require_tall(U, "qdeim");
    return GreedyOversampler(U).first(U.cols());
}

IndexSet maxvol(const Matrix& U, const MaxvolOptions& opts) {
    require_tall(U, "maxvol");
    if (opts.max_iters < 1 || !(opts.swap_tol > 1.0))
        throw ArgumentError("maxvol: need max_iters >= 1 and swap_tol > 1");
    const Index n = U.rows();
    const Index r = U.cols();
    std::vector<Index> p = qdeim(U).indices();

    {
        const Vector sv = linalg::singular_values(U(p, Eigen::all));
        if (!(sv(r - 1) > 1e-14 * sv(0)))
            throw DegeneracyError("maxvol: initial submatrix is singular",
                                  sv(r - 1) > 0 ? sv(0) / sv(r - 1)
                                                : std::numeric_limits<double>::infinity());
    }

    for (int it = 0; it < opts.max_iters; ++it) {
        // B = U * U(p,:)^{-1}
        Eigen::PartialPivLU<Matrix> lu(Matrix(U(p, Eigen::all)).transpose());
        const Matrix B = lu.solve(U.transpose()).transpose();
        Index bi = 0, bj = 0;
        double best = -1.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < r; ++j)
                if (std::abs(B(i, j)) > best) {
                    best = std::abs(B(i, j));
                    bi = i;
                    bj = j;
                }
        if (best <= opts.swap_tol) break;
        p[static_cast<std::size_t>(bj)] = bi;
    }
    return IndexSet(std::move(p), n);
}

IndexSet gpode(const Matrix& U, Index k) {
    require_tall(U, "gpode");
    if (k < U.cols() || k > U.rows()) throw ArgumentError("gpode: need r <= k <= n");
    return GreedyOversampler(U).first(k);
}

IndexSet gpode_extend(const Matrix& U, const IndexSet& seed, Index k) {
    if (k < seed.size() || k > U.rows()) throw ArgumentError("gpode_extend: need |seed| <= k <= n");
    return GreedyOversampler(U, seed).first(k);
}

GreedyOversampler::GreedyOversampler(const Matrix& U)
    : U_(U),
      taken_(static_cast<std::size_t>(U.rows()), 0),
      residual_(U),
      gram_(Matrix::Zero(U.cols(), U.cols())) {
    if (U.cols() < 1) throw ArgumentError("GreedyOversampler: empty basis");
}

GreedyOversampler::GreedyOversampler(const Matrix& U, const IndexSet& seed) : GreedyOversampler(U) {
    if (seed.ambient() != U.rows()) throw ArgumentError("GreedyOversampler: seed ambient mismatch");
    for (Index i : seed) add(i);
}

void GreedyOversampler::add(Index i) {
    selected_.push_back(i);
    taken_[static_cast<std::size_t>(i)] = 1;
    const Vector u = U_.row(i).transpose();
    gram_.noalias() += u * u.transpose();

    // Deflate the residual rows against the new direction (twice, for
    // orthogonality in finite precision).
    if (static_cast<Index>(selected_.size()) <= U_.cols()) {
        Vector q = residual_.row(i).transpose();
        const double nq = q.norm();
        if (nq > 0.0) {
            q /= nq;
            for (int pass = 0; pass < 2; ++pass) residual_ -= (residual_ * q) * q.transpose();
        }
    }
}

Index GreedyOversampler::next_pivoted_qr() const {
    Index best = -1;
    double best_val = -1.0;
    for (Index i = 0; i < U_.rows(); ++i) {
        if (taken_[static_cast<std::size_t>(i)]) continue;
        const double v = residual_.row(i).squaredNorm();
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    return best;
}

Index GreedyOversampler::next_sigma_min() {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_);
    const Vector& lambda = eig.eigenvalues();
    const Matrix& V = eig.eigenvectors();
    const Matrix W = U_ * V; // row i holds V^T u_i

    Index best = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < U_.rows(); ++i) {
        if (taken_[static_cast<std::size_t>(i)]) continue;
        const double score = min_eig_rank_one_update(lambda, W.row(i).transpose());
        if (score > best_val) {
            best_val = score;
            best = i;
        }
    }
    return best;
}

IndexSet GreedyOversampler::first(Index k) {
    if (k < 0 || k > U_.rows()) throw ArgumentError("GreedyOversampler: k out of range");
    while (static_cast<Index>(selected_.size()) < k) {
        const Index next = static_cast<Index>(selected_.size()) < U_.cols() ? next_pivoted_qr()
                                                                            : next_sigma_min();
        add(next);
    }
    return IndexSet(std::vector<Index>(selected_.begin(), selected_.begin() + k), U_.rows());
}

double GreedyOversampler::pinv_norm(Index k) {
    const IndexSet sel = first(k);
    const double smin = linalg::smallest_singular_value(U_(sel.indices(), Eigen::all));
    return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
}

} // namespace curos::sampling
