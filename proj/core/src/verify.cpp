#include "curos/verify.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>

#include "curos/cur.hpp"
#include "curos/integrator.hpp"
#include "curos/linalg.hpp"
#include "curos/models.hpp"
#include "curos/rng.hpp"
#include "curos/sampling.hpp"

namespace curos::verify {

namespace {

std::string fmt(const char* label, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s=%.3e", label, v);
    return buf;
}

Matrix random_matrix(Index n, Index m, Rng& rng) {
    Matrix A(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) A(i, j) = rng.normal();
    return A;
}

Check guarded(const std::string& name, const std::function<Check()>& body) {
    try {
        Check c = body();
        c.name = name;
        return c;
    } catch (const std::exception& e) {
        return {name, false, std::string("threw: ") + e.what()};
    }
}

Check oracle_consistency(const models::StencilOracle& model, const LowRankState& X, Rng& rng) {
    const Matrix F = model.eval_full(X.materialize(), 0.05);
    const IndexSet p({0, 1, model.rows() / 2, model.rows() - 1}, model.rows());
    const IndexSet s({static_cast<Index>(rng.uniform() * static_cast<double>(model.cols())), model.cols() - 1},
                     model.cols());
    double err = (model.eval_cols(X, 0.05, s) - linalg::select_cols(F, s)).norm();
    err = std::max(err, (model.eval_rows(X, 0.05, p) - linalg::select_rows(F, p)).norm());
    err = std::max(err, (model.eval_cross(X, 0.05, p, s) - linalg::select(F, p, s)).norm());
    const double rel = err / std::max(1.0, F.norm());
    return {"", rel < 1e-12, fmt("rel_mismatch", rel)};
}

} // namespace

std::vector<Check> run_checks(std::uint64_t seed) {
    std::vector<Check> out;
    Rng rng(seed);

    out.push_back(guarded("toy_singular_values", [&] {
        const Matrix A = models::toy_matrix({100, models::Decay::fast, seed});
        const Vector sv = linalg::singular_values(A);
        const Vector expect = std::exp(1.0) * models::toy_decay(100, models::Decay::fast);
        const double err = ((sv - expect).array().abs() / expect.array().max(1e-300)).head(30).maxCoeff();
        return Check{"", err < 1e-8, fmt("max_rel_err_top30", err)};
    }));

    out.push_back(guarded("cur_exact_rank_recovery", [&] {
        const Index n = 40, m = 30, r = 5;
        const Matrix A = random_matrix(n, r, rng) * random_matrix(r, m, rng);
        const auto svd = linalg::svd_truncated(A, r);
        const IndexSet p = sampling::qdeim(svd.U);
        const IndexSet s = sampling::qdeim(svd.V);
        const Matrix cols = linalg::select_cols(A, s), rows = linalg::select_rows(A, p);
        const double e_cr = (cur::cur_cr(cols, rows, linalg::select(A, p, s)).reconstruct() - A).norm();
        const auto os = cur::cur_cr_os(cols, rows, p, s,
                                       [&](const IndexSet& a, const IndexSet& b) { return linalg::select(A, a, b); },
                                       {3, 3, 10.0, false});
        const double e_os = (os.factors.reconstruct() - A).norm();
        const double rel = std::max(e_cr, e_os) / A.norm();
        return Check{"", rel < 1e-10, fmt("rel_err", rel)};
    }));

    out.push_back(guarded("cur_full_index_limit", [&] {
        const Index n = 20;
        const Matrix A = random_matrix(n, n, rng);
        const double e = (cur::cur_cr(A, A, A).reconstruct() - A).norm() / A.norm();
        return Check{"", e < 1e-10, fmt("rel_err", e)};
    }));

    out.push_back(guarded("gpode_prefix_is_qdeim", [&] {
        const Matrix Q = linalg::thin_qr(random_matrix(50, 6, rng)).Q;
        const IndexSet g = sampling::gpode(Q, 12);
        const IndexSet q = sampling::qdeim(Q);
        bool same = true;
        for (Index i = 0; i < 6; ++i) same = same && g[i] == q[i];
        return Check{"", same && g.size() == 12, same ? "prefix matches" : "prefix differs"};
    }));

    out.push_back(guarded("lumped_mass_total", [&] {
        Matrix M = random_matrix(8, 8, rng).cwiseAbs();
        M = (M + M.transpose()).eval();
        const Vector m = models::lump_mass(M);
        const double e = std::abs(m.sum() - M.sum()) / M.sum();
        return Check{"", e < 1e-14, fmt("rel_err", e)};
    }));

    out.push_back(guarded("burgers_oracle_consistency", [&] {
        models::SpdeSpec spec = models::SpdeSpec::desk(models::SpdeKind::burgers);
        spec.seed = seed;
        models::SpdeModel model(spec);
        return oracle_consistency(model, model.initial_state(spec.d + 1), rng);
    }));

    out.push_back(guarded("kdv_oracle_consistency", [&] {
        models::SpdeSpec spec = models::SpdeSpec::desk(models::SpdeKind::kdv);
        spec.n = 128;
        spec.seed = seed;
        models::SpdeModel model(spec);
        return oracle_consistency(model, model.initial_state(spec.d + 1), rng);
    }));

    out.push_back(guarded("heat_oracle_consistency", [&] {
        const models::HeatSystem sys = models::synthetic_heat_system();
        const Matrix TB = models::heat_boundary_temperatures(sys.boundary_xy, models::heat_corner_samples(8, seed));
        models::HeatModel model(sys, TB);
        LowRankState X = LowRankState::from_matrix(model.initial_full() + 5.0 * random_matrix(model.rows(), 8, rng), 3);
        return oracle_consistency(model, X, rng);
    }));

    return out;
}

} // namespace curos::verify
