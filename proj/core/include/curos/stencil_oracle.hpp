#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "curos/integrator.hpp"

namespace curos::models {

// RhsOracle for right-hand sides where F(A)(i, j) depends only on column j of
// A at a short list of rows (the stencil of row i). Subclasses supply the
// stencil and the pointwise kernel; this class gathers state values through
// the low-rank factors and counts the factor reads it performs.
class StencilOracle : public integrator::RhsOracle, public integrator::FullRhs {
public:
    StencilOracle(Index n, Index s) : n_(n), s_(s) {}

    Index rows() const override { return n_; }
    Index cols() const override { return s_; }

    Matrix eval_cols(const LowRankState& state, double t, const IndexSet& s) const override;
    Matrix eval_rows(const LowRankState& state, double t, const IndexSet& p) const override;
    Matrix eval_cross(const LowRankState& state, double t, const IndexSet& p, const IndexSet& s) const override;
    Matrix eval_full(const Matrix& A, double t) const override;

    // Scalar reads of U, sigma, Y performed by the three low-rank access
    // patterns since construction or the last reset: one per factor per
    // rank index per reconstructed state entry.
    long long factor_reads() const noexcept { return reads_.load(); }
    void reset_factor_reads() noexcept { reads_.store(0); }

    // Largest stencil length over all rows.
    virtual Index stencil_width() const = 0;

    // Rows of A that F(A)(i, :) depends on. May be empty (e.g. Dirichlet rows).
    virtual void stencil(Index i, std::vector<Index>& out) const = 0;

protected:
    // F(A)(i, j) given v[k] = A(stencil(i)[k], j).
    virtual double kernel(Index i, Index j, double t, std::span<const double> v) const = 0;

private:
    Matrix evaluate(const LowRankState* state, const Matrix* dense, double t, const std::vector<Index>& rows,
                    const std::vector<Index>& cols) const;

    Index n_, s_;
    mutable std::atomic<long long> reads_{0};
};

} // namespace curos::models
