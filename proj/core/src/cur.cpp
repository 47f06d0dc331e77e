#include "curos/cur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curos/errors.hpp"
#include "curos/sampling.hpp"

namespace curos::cur {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orthonormal basis for range(M): Householder Q when M has full column rank,
// otherwise the dominant left singular vectors.
Matrix range_basis(const Matrix& M) {
    auto qr = linalg::thin_qr(M);
    const Vector d = qr.R.diagonal().cwiseAbs();
    const double tol = std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(M.rows(), M.cols())) * d.maxCoeff();
    if (M.cols() == 0 || d.minCoeff() > tol) return std::move(qr.Q);

    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    const double cut = std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(M.rows(), M.cols())) * sv(0);
    Index k = 0;
    while (k < sv.size() && sv(k) > cut) ++k;
    return svd.matrixU().leftCols(k);
}

struct Adapted {
    Index m = 0;
    double eta = 1.0;
    bool bound_hit = false;
};

// Smallest m in [0, max_m] with pinv_norm(r + m) <= eps, searched upward and
// then downward from m0. The selections are nested, so pinv_norm is
// non-increasing in m.
Adapted adapt_oversampling(sampling::GreedyOversampler& sel, Index r, Index m0, Index max_m, double eps,
                           bool adaptive) {
    Adapted out;
    out.m = std::clamp<Index>(m0, 0, max_m);
    out.eta = sel.pinv_norm(r + out.m);
    if (!adaptive) return out;

    while (out.eta > eps && out.m < max_m) {
        ++out.m;
        out.eta = sel.pinv_norm(r + out.m);
    }
    if (out.eta > eps) {
        out.bound_hit = true;
        return out;
    }
    while (out.m > 0) {
        const double lower = sel.pinv_norm(r + out.m - 1);
        if (lower > eps) break;
        --out.m;
        out.eta = lower;
    }
    return out;
}

} // namespace

CurFactors cur_cr(const Matrix& cols, const Matrix& rows, const Matrix& intersection) {
    const Index r = cols.cols();
    if (rows.rows() != r || intersection.rows() != r || intersection.cols() != r)
        throw ArgumentError("cur_cr: cols, rows and intersection must share the rank r");

    const Vector sv = linalg::singular_values(intersection);
    const double cond = sv(r - 1) > 0.0 ? sv(0) / sv(r - 1) : kInf;
    if (!(cond < 1.0 / std::numeric_limits<double>::epsilon()))
        throw DegeneracyError("cur_cr: singular intersection matrix (cond = " + std::to_string(cond) + ")",
                              cond);

    auto qc = linalg::thin_qr(cols);
    auto qr = linalg::thin_qr(rows.transpose());
    // A(:,s) = Qc Rc and A(p,:) = Rr^T Qr^T give Z = Rc W^{-1} Rr^T.
    Eigen::PartialPivLU<Matrix> lu(intersection);
    Matrix Z = qc.R * lu.solve(Matrix(qr.R.transpose()));
    return {std::move(qc.Q), std::move(Z), std::move(qr.Q)};
}

CurFactors cur_opt(const Matrix& A, const IndexSet& p, const IndexSet& s) {
    if (p.ambient() != A.rows() || s.ambient() != A.cols())
        throw ArgumentError("cur_opt: index sets do not match the matrix");
    Matrix Qc = range_basis(linalg::select_cols(A, s));
    Matrix Qr = range_basis(linalg::select_rows(A, p).transpose());
    Matrix Z = Qc.transpose() * A * Qr;
    return {std::move(Qc), std::move(Z), std::move(Qr)};
}

CurOsResult cur_cr_os(const Matrix& cols, const Matrix& rows, const IndexSet& p, const IndexSet& s,
                      const CrossSupplier& cross, const CurOsOptions& opts) {
    const Index n = cols.rows();
    const Index ns = rows.cols();
    const Index r = cols.cols();
    if (rows.rows() != r || p.size() != r || s.size() != r)
        throw ArgumentError("cur_cr_os: inconsistent rank between cols, rows and index sets");
    if (p.ambient() != n || s.ambient() != ns)
        throw ArgumentError("cur_cr_os: index set ambient dimensions do not match");
    if (!(opts.eps_os > 1.0)) throw ArgumentError("cur_cr_os: eps_os must exceed 1");
    if (opts.m_r0 < 0 || opts.m_c0 < 0) throw ArgumentError("cur_cr_os: negative oversampling");

    auto qc = linalg::thin_qr(cols);
    auto qr = linalg::thin_qr(rows.transpose());

    sampling::GreedyOversampler row_sel(qc.Q, p);
    sampling::GreedyOversampler col_sel(qr.Q, s);
    const Adapted ar = adapt_oversampling(row_sel, r, opts.m_r0, n - r, opts.eps_os, opts.adaptive);
    const Adapted ac = adapt_oversampling(col_sel, r, opts.m_c0, ns - r, opts.eps_os, opts.adaptive);

    CurOsResult out;
    out.p_bar = row_sel.first(r + ar.m);
    out.s_bar = col_sel.first(r + ac.m);
    out.indicators = {ar.eta, ac.eta, ar.m, ac.m, ar.bound_hit, ac.bound_hit};

    const Matrix X = cross(out.p_bar, out.s_bar);
    if (X.rows() != out.p_bar.size() || X.cols() != out.s_bar.size())
        throw ArgumentError("cur_cr_os: cross supplier returned " + std::to_string(X.rows()) + "x" +
                            std::to_string(X.cols()) + ", expected " + std::to_string(out.p_bar.size()) +
                            "x" + std::to_string(out.s_bar.size()));

    // Z = Qc(p_bar,:)^+ X Qr(s_bar,:)^{+T} through minimum-norm solves.
    const Eigen::CompleteOrthogonalDecomposition<Matrix> left(linalg::select_rows(qc.Q, out.p_bar));
    const Eigen::CompleteOrthogonalDecomposition<Matrix> right(linalg::select_rows(qr.Q, out.s_bar));
    const Matrix W = left.solve(X);
    Matrix Z = right.solve(Matrix(W.transpose())).transpose();
    out.factors = {std::move(qc.Q), std::move(Z), std::move(qr.Q)};
    return out;
}

LowRankState to_svd_form(const CurFactors& f) {
    Eigen::JacobiSVD<Matrix> svd(f.Z, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Index k = std::min(f.Z.rows(), f.Z.cols());
    return {f.Qc * svd.matrixU().leftCols(k), svd.singularValues(), f.Qr * svd.matrixV().leftCols(k)};
}

std::pair<double, double> eta_exact(const Matrix& A, const IndexSet& p, const IndexSet& s, Index r) {
    if (p.size() != r || s.size() != r) throw ArgumentError("eta_exact: |p| and |s| must equal r");
    const auto svd = linalg::svd_truncated(A, r);
    auto inv_norm = [](const Matrix& M) {
        const double smin = linalg::smallest_singular_value(M);
        return smin > 0.0 ? 1.0 / smin : kInf;
    };
    return {inv_norm(linalg::select_rows(svd.U, p)), inv_norm(linalg::select_rows(svd.V, s))};
}

double error_bound(double eta_p, double eta_s, double eta_bar_p, double eta_bar_s, double sigma_r1) {
    if (eta_p < 0 || eta_s < 0 || eta_bar_p < 0 || eta_bar_s < 0 || sigma_r1 < 0)
        throw ArgumentError("error_bound: inputs must be non-negative");
    if (sigma_r1 == 0.0) return 0.0;
    const double a = eta_bar_p * (eta_s + eta_p * eta_bar_s);
    const double b = eta_bar_s * (eta_p + eta_bar_p * eta_s);
    return std::min(a, b) * sigma_r1;
}

ObliqueProjectors oblique_projection_forms(const Matrix& A, const IndexSet& p, const IndexSet& s,
                                           const IndexSet& p_bar, const IndexSet& s_bar) {
    const Index n = A.rows();
    const Index ns = A.cols();
    if (p.ambient() != n || p_bar.ambient() != n || s.ambient() != ns || s_bar.ambient() != ns)
        throw ArgumentError("oblique_projection_forms: index sets do not match the matrix");

    const Matrix C = linalg::select_cols(A, s);
    const Matrix R = linalg::select_rows(A, p);
    auto full_rank = [](const Matrix& M) {
        const Vector sv = linalg::singular_values(M);
        return sv.size() == std::min(M.rows(), M.cols()) && sv(sv.size() - 1) > 1e-12 * sv(0);
    };
    if (!full_rank(C) || !full_rank(R))
        throw DegeneracyError("oblique_projection_forms: selected columns or rows are rank deficient");

    const Matrix Qc = linalg::thin_qr(C).Q;
    const Matrix Qr = linalg::thin_qr(R.transpose()).Q;

    ObliqueProjectors out;
    out.P_basis = Matrix::Zero(n, n);
    out.P_elem = Matrix::Zero(n, n);
    out.S_basis = Matrix::Zero(ns, ns);
    out.S_elem = Matrix::Zero(ns, ns);

    out.P_basis(Eigen::all, p_bar.indices()) = Qc * linalg::pinv(linalg::select_rows(Qc, p_bar));
    out.P_elem(Eigen::all, p_bar.indices()) = C * linalg::pinv(linalg::select_rows(C, p_bar));
    out.S_basis(s_bar.indices(), Eigen::all) =
        linalg::pinv(Matrix(linalg::select_rows(Qr, s_bar).transpose())) * Qr.transpose();
    out.S_elem(s_bar.indices(), Eigen::all) = linalg::pinv(linalg::select_cols(R, s_bar)) * R;
    return out;
}

long long entry_count(long long n, long long s, long long r, long long m_r, long long m_c) {
    if (r < 0 || r > std::min(n, s) || m_r < 0 || m_c < 0)
        throw ArgumentError("entry_count: need 0 <= r <= min(n, s) and m >= 0");
    return n * r + r * s - r * r + m_r * m_c;
}

} // namespace curos::cur
