#include "curos/stencil_oracle.hpp"

#include "curos/errors.hpp"

namespace curos::models {

Matrix StencilOracle::evaluate(const LowRankState* state, const Matrix* dense, double t,
                               const std::vector<Index>& rows, const std::vector<Index>& cols) const {
    std::vector<Index> pos(static_cast<std::size_t>(n_), -1);
    std::vector<Index> needed;
    std::vector<std::vector<Index>> stencils(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        stencil(rows[a], stencils[a]);
        for (Index k : stencils[a]) {
            if (pos[static_cast<std::size_t>(k)] < 0) {
                pos[static_cast<std::size_t>(k)] = static_cast<Index>(needed.size());
                needed.push_back(k);
            }
        }
    }

    Matrix V;
    if (state) {
        V = state->U(needed, Eigen::all) * state->sigma.asDiagonal() * state->Y(cols, Eigen::all).transpose();
        reads_ += static_cast<long long>(needed.size()) * static_cast<long long>(cols.size()) * state->rank();
    } else {
        V = (*dense)(needed, cols);
    }

    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    std::vector<double> v;
    for (std::size_t a = 0; a < rows.size(); ++a) {
        const auto& st = stencils[a];
        v.resize(st.size());
        for (std::size_t b = 0; b < cols.size(); ++b) {
            for (std::size_t k = 0; k < st.size(); ++k)
                v[k] = V(pos[static_cast<std::size_t>(st[k])], static_cast<Index>(b));
            out(static_cast<Index>(a), static_cast<Index>(b)) = kernel(rows[a], cols[b], t, v);
        }
    }
    return out;
}

namespace {

void check(const LowRankState& state, Index n, Index s) {
    if (state.rows() != n || state.cols() != s) throw ArgumentError("oracle: state dimensions do not match the model");
}

std::vector<Index> all_of(Index n) {
    std::vector<Index> v(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
}

} // namespace

Matrix StencilOracle::eval_cols(const LowRankState& state, double t, const IndexSet& s) const {
    check(state, n_, s_);
    if (s.ambient() != s_) throw ArgumentError("oracle: column set does not match the model");
    return evaluate(&state, nullptr, t, all_of(n_), s.indices());
}

Matrix StencilOracle::eval_rows(const LowRankState& state, double t, const IndexSet& p) const {
    check(state, n_, s_);
    if (p.ambient() != n_) throw ArgumentError("oracle: row set does not match the model");
    return evaluate(&state, nullptr, t, p.indices(), all_of(s_));
}

Matrix StencilOracle::eval_cross(const LowRankState& state, double t, const IndexSet& p, const IndexSet& s) const {
    check(state, n_, s_);
    if (p.ambient() != n_ || s.ambient() != s_) throw ArgumentError("oracle: index sets do not match the model");
    return evaluate(&state, nullptr, t, p.indices(), s.indices());
}

Matrix StencilOracle::eval_full(const Matrix& A, double t) const {
    if (A.rows() != n_ || A.cols() != s_) throw ArgumentError("oracle: state dimensions do not match the model");
    return evaluate(nullptr, &A, t, all_of(n_), all_of(s_));
}

} // namespace curos::models
