#pragma once

// CUR constructions: cross (CUR-CR), optimal (CUR-opt) and adaptive cross
// oversampling (CUR-CR-OS), plus the analysis quantities used to check them.

#include <functional>
#include <utility>

#include "curos/index_set.hpp"
#include "curos/linalg.hpp"
#include "curos/low_rank.hpp"

namespace curos::cur {

// A_hat = Qc Z Qr^T with orthonormal Qc (n x r) and Qr (s x r).
struct CurFactors {
    Matrix Qc;
    Matrix Z;
    Matrix Qr;

    Matrix reconstruct() const { return Qc * Z * Qr.transpose(); }
};

struct OversampleIndicators {
    double eta_bar_p = 1.0; // ||pinv(Qc(p_bar, :))||_2
    double eta_bar_s = 1.0; // ||pinv(Qr(s_bar, :))||_2
    Index m_r = 0;
    Index m_c = 0;
    // Set when the oversampling bound (n - r or s - r) was reached without
    // meeting eps_os.
    bool row_bound_hit = false;
    bool col_bound_hit = false;

    bool bound_hit() const noexcept { return row_bound_hit || col_bound_hit; }
};

// Supplies A(p_bar, s_bar) on demand, so the full matrix is never needed.
using CrossSupplier = std::function<Matrix(const IndexSet& p_bar, const IndexSet& s_bar)>;

struct CurOsOptions {
    Index m_r0 = 0;
    Index m_c0 = 0;
    double eps_os = 10.0;
    // When false, m_r0 / m_c0 are used as given.
    bool adaptive = true;
};

struct CurOsResult {
    CurFactors factors;
    OversampleIndicators indicators;
    IndexSet p_bar;
    IndexSet s_bar;
};

// Cross approximation C A(p,s)^{-1} R from r columns, r rows and their
// intersection. Throws DegeneracyError (carrying the condition number) when
// the intersection is singular to working precision.
CurFactors cur_cr(const Matrix& cols, const Matrix& rows, const Matrix& intersection);

// Frobenius-optimal Z = C^+ A R^+ for the given selection.
CurFactors cur_opt(const Matrix& A, const IndexSet& p, const IndexSet& s);

// Adaptive cross oversampling. `cols` = A(:, s), `rows` = A(p, :). The
// oversampled sets are nested on p and s: p_bar = p followed by greedy
// sigma_min rows of Qc, likewise s_bar on Qr. With m = 0 this reproduces
// cur_cr; with every index selected it reproduces cur_opt.
CurOsResult cur_cr_os(const Matrix& cols, const Matrix& rows, const IndexSet& p, const IndexSet& s,
                      const CrossSupplier& cross, const CurOsOptions& opts = {});

// Z = Psi_c Sigma Psi_r^T, U = Qc Psi_c, Y = Qr Psi_r.
LowRankState to_svd_form(const CurFactors& f);

// eta_p = ||(U(p,:))^{-1}||, eta_s = ||(Y(s,:))^{-1}|| on the leading r exact
// singular vectors of A. +inf for singular submatrices. Analysis only.
std::pair<double, double> eta_exact(const Matrix& A, const IndexSet& p, const IndexSet& s, Index r);

// min{eta_bar_p (eta_s + eta_p eta_bar_s), eta_bar_s (eta_p + eta_bar_p eta_s)} * sigma_{r+1}
double error_bound(double eta_p, double eta_s, double eta_bar_p, double eta_bar_s, double sigma_r1);

struct ObliqueProjectors {
    Matrix P_basis; // Qc (P_bar^T Qc)^+ P_bar^T
    Matrix P_elem;  // A S (P_bar^T A S)^+ P_bar^T
    Matrix S_basis; // S_bar (Qr^T S_bar)^+ Qr^T
    Matrix S_elem;  // S_bar (P^T A S_bar)^+ P^T A
};

// Both algebraic forms of the row/column projectors. Throws DegeneracyError
// when A(:, s) or A(p, :) is rank deficient.
ObliqueProjectors oblique_projection_forms(const Matrix& A, const IndexSet& p, const IndexSet& s,
                                           const IndexSet& p_bar, const IndexSet& s_bar);

// Matrix entries read by CUR-CR-OS: n r + r s - r^2 + m_r m_c.
long long entry_count(long long n, long long s, long long r, long long m_r, long long m_c);

} // namespace curos::cur
