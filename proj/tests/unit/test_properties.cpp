#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"

#include "curos/cur.hpp"
#include "curos/emit.hpp"
#include "curos/errors.hpp"
#include "curos/integrator.hpp"
#include "curos/linalg.hpp"
#include "curos/models.hpp"
#include "curos/rng.hpp"
#include "curos/sampling.hpp"

using namespace curos;
using namespace curos::integrator;

namespace {

Matrix random_matrix(Index n, Index m, std::uint64_t seed) {
    Rng rng(seed);
    Matrix A(n, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i) A(i, j) = rng.normal();
    return A;
}

Matrix random_orthonormal(Index n, Index r, std::uint64_t seed) { return linalg::thin_qr(random_matrix(n, r, seed)).Q; }

double det_abs(const Matrix& M) { return std::abs(M.determinant()); }

// Straight-line DEIM: pick the argmax of the interpolation residual column by column.
std::vector<Index> deim_reference(const Matrix& U) {
    std::vector<Index> p;
    Index i0;
    U.col(0).cwiseAbs().maxCoeff(&i0);
    p.push_back(i0);
    for (Index l = 1; l < U.cols(); ++l) {
        Matrix Up(l, l);
        Vector up(l);
        for (Index a = 0; a < l; ++a) {
            for (Index b = 0; b < l; ++b) Up(a, b) = U(p[a], b);
            up(a) = U(p[a], l);
        }
        const Vector c = Up.fullPivLu().solve(up);
        const Vector res = U.col(l) - U.leftCols(l) * c;
        Index i;
        res.cwiseAbs().maxCoeff(&i);
        p.push_back(i);
    }
    return p;
}

class ZeroRhs : public RhsOracle {
public:
    ZeroRhs(Index n, Index s) : n_(n), s_(s) {}
    Index rows() const override { return n_; }
    Index cols() const override { return s_; }
    Matrix eval_cols(const LowRankState&, double, const IndexSet& s) const override { return Matrix::Zero(n_, s.size()); }
    Matrix eval_rows(const LowRankState&, double, const IndexSet& p) const override { return Matrix::Zero(p.size(), s_); }
    Matrix eval_cross(const LowRankState&, double, const IndexSet& p, const IndexSet& s) const override {
        return Matrix::Zero(p.size(), s.size());
    }

private:
    Index n_, s_;
};

class ScalarDecay : public FullRhs {
public:
    Matrix eval_full(const Matrix& A, double) const override { return -A; }
};

} // namespace

// ---------------------------------------------------------------- linalg

TEST_CASE("qr of a 2-vector and of orthonormal columns") {
    Matrix a(2, 1);
    a << 3.0, 4.0;
    const auto qr = linalg::thin_qr(a);
    CHECK(std::abs(qr.Q(0, 0)) == doctest::Approx(0.6));
    CHECK(std::abs(qr.Q(1, 0)) == doctest::Approx(0.8));
    CHECK(std::abs(qr.R(0, 0)) == doctest::Approx(5.0));

    const Matrix E = Matrix::Identity(3, 3).leftCols(2);
    const auto qe = linalg::thin_qr(E);
    CHECK((qe.Q * qe.R - E).norm() <= 1e-15);
    CHECK((qe.R.cwiseAbs() - Matrix::Identity(2, 2)).norm() <= 1e-15);
}

TEST_CASE("truncated svd error equals the discarded tail") {
    const Matrix A = random_matrix(60, 40, 11);
    const Vector sv = linalg::singular_values(A);
    const auto t = linalg::svd_truncated(A, 10);
    const double err = (A - t.U * t.sigma.asDiagonal() * t.V.transpose()).norm();
    CHECK(err == doctest::Approx(sv.tail(30).norm()).epsilon(1e-10));

    Matrix D = Matrix::Zero(3, 3);
    D.diagonal() << 3.0, 2.0, 1.0;
    const auto d = linalg::svd_truncated(D, 2);
    CHECK(d.sigma(0) == doctest::Approx(3.0));
    CHECK(d.sigma(1) == doctest::Approx(2.0));
    CHECK((D - d.U * d.sigma.asDiagonal() * d.V.transpose()).norm() == doctest::Approx(1.0));
}

TEST_CASE("pseudoinverse satisfies the four Penrose identities") {
    const Matrix A = random_matrix(7, 4, 12);
    const Matrix X = linalg::pinv(A);
    CHECK((A * X * A - A).norm() <= 1e-10);
    CHECK((X * A * X - X).norm() <= 1e-10);
    CHECK((A * X - (A * X).transpose()).norm() <= 1e-10);
    CHECK((X * A - (X * A).transpose()).norm() <= 1e-10);

    const Matrix Q = random_orthonormal(9, 3, 13);
    CHECK((linalg::pinv(Q) - Q.transpose()).norm() <= 1e-12);
}

TEST_CASE("spectral norm agrees with power iteration") {
    const Matrix A = random_matrix(30, 30, 14);
    const Matrix G = A.transpose() * A;
    Vector v = Vector::Ones(30).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        const Vector w = G * v;
        const double next = w.norm();
        v = w / next;
        if (std::abs(next - lambda) <= 1e-15 * next) break;
        lambda = next;
    }
    CHECK(linalg::spectral_norm(A) == doctest::Approx(std::sqrt(lambda)).epsilon(1e-8));
    CHECK(linalg::spectral_norm(Matrix::Zero(4, 3)) == 0.0);
}

TEST_CASE("matrix exponential of skew matrices") {
    CHECK((linalg::expm_skew(Matrix::Zero(5, 5)) - Matrix::Identity(5, 5)).norm() <= 1e-15);
    const Matrix R = random_matrix(20, 20, 15);
    const Matrix W = 0.5 * (R - R.transpose());
    const Matrix prod = linalg::expm_skew(W) * linalg::expm_skew(-W);
    CHECK((prod - Matrix::Identity(20, 20)).norm() <= 1e-10);
}

// ---------------------------------------------------------------- sampling

TEST_CASE("deim matches a straight-line reference recursion") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Matrix U = random_orthonormal(40, 5, 100 + seed);
        const IndexSet p = sampling::deim(U);
        CHECK(p.indices() == deim_reference(U));
        CHECK(std::isfinite(linalg::pinv(linalg::select_rows(U, p)).norm()));
    }
    Matrix v(3, 1);
    v << 0.1, 1.0, 0.5;
    CHECK(sampling::deim(v).indices() == std::vector<Index>{1});
}

TEST_CASE("qdeim on canonical columns and single columns") {
    const Matrix I10 = Matrix::Identity(10, 10);
    Matrix U(10, 2);
    U.col(0) = I10.col(2);
    U.col(1) = I10.col(6);
    std::vector<Index> p = sampling::qdeim(U).indices();
    std::sort(p.begin(), p.end());
    CHECK(p == std::vector<Index>{2, 6});

    const Matrix u = random_orthonormal(30, 1, 16);
    Index i;
    u.col(0).cwiseAbs().maxCoeff(&i);
    CHECK(sampling::qdeim(u).indices() == std::vector<Index>{i});
    CHECK(sampling::deim(u).indices() == std::vector<Index>{i});
}

TEST_CASE("qdeim stays within 10x of deim on random bases") {
    int worse = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Matrix U = random_orthonormal(50, 6, 200 + seed);
        const double q = linalg::spectral_norm(linalg::pinv(linalg::select_rows(U, sampling::qdeim(U))));
        const double d = linalg::spectral_norm(linalg::pinv(linalg::select_rows(U, sampling::deim(U))));
        if (q > 10.0 * d) ++worse;
    }
    CHECK(worse == 0);
}

TEST_CASE("maxvol dominates random subsets and covers square bases") {
    const Matrix U = random_orthonormal(30, 4, 17);
    const double best = det_abs(linalg::select_rows(U, sampling::maxvol(U)));
    Rng rng(18);
    int beaten = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Index> all(30);
        std::iota(all.begin(), all.end(), Index{0});
        for (Index k = 0; k < 4; ++k) {
            const Index j = k + static_cast<Index>(rng.uniform() * double(30 - k));
            std::swap(all[k], all[std::min<Index>(j, 29)]);
        }
        all.resize(4);
        if (det_abs(linalg::select_rows(U, IndexSet(all, 30))) > best * (1.0 + 1e-12)) ++beaten;
    }
    CHECK(beaten == 0);

    const Matrix E = Matrix::Identity(4, 4).leftCols(2);
    const IndexSet pe = sampling::maxvol(E);
    CHECK(det_abs(linalg::select_rows(E, pe)) == doctest::Approx(1.0));

    const Matrix Q = random_orthonormal(2, 2, 19);
    std::vector<Index> pq = sampling::maxvol(Q).indices();
    std::sort(pq.begin(), pq.end());
    CHECK(pq == std::vector<Index>{0, 1});
}

TEST_CASE("greedy oversampling limits and monotone improvement") {
    const Matrix U = random_orthonormal(25, 3, 20);
    CHECK(sampling::gpode(U, 3).indices() == sampling::qdeim(U).indices());
    std::vector<Index> all = sampling::gpode(U, 25).indices();
    std::sort(all.begin(), all.end());
    CHECK(static_cast<Index>(all.size()) == 25);
    CHECK(all.front() == 0);
    CHECK(all.back() == 24);
    const double base = linalg::smallest_singular_value(linalg::select_rows(U, sampling::qdeim(U)));
    const double over = linalg::smallest_singular_value(linalg::select_rows(U, sampling::gpode(U, 5)));
    CHECK(over >= base);
}

// ---------------------------------------------------------------- cur

TEST_CASE("cross approximation of small exact cases") {
    Matrix A(2, 2);
    A << 1.0, 2.0, 2.0, 4.0;
    const IndexSet p({1}, 2), s({1}, 2);
    const auto f = cur::cur_cr(linalg::select_cols(A, s), linalg::select_rows(A, p), linalg::select(A, p, s));
    CHECK((f.reconstruct() - A).norm() <= 1e-12);

    const Matrix I3 = Matrix::Identity(3, 3);
    const IndexSet all = IndexSet::range(3, 3);
    const auto g = cur::cur_cr(I3, I3, I3);
    CHECK((g.reconstruct() - I3).norm() <= 1e-12);
    (void)all;
}

TEST_CASE("cross approximation of the fast-decay toy tracks the svd error") {
    models::ToySpec spec;
    spec.decay = models::Decay::fast;
    const Matrix A = models::toy_matrix(spec);
    const auto t = linalg::svd_truncated(A, 18);
    const IndexSet p = sampling::deim(t.U), s = sampling::deim(t.V);
    const auto f = cur::cur_cr(linalg::select_cols(A, s), linalg::select_rows(A, p), linalg::select(A, p, s));
    const Vector sv = linalg::singular_values(A);
    const double err = linalg::spectral_norm(f.reconstruct() - A) / sv(0);
    CHECK(err <= 10.0 * sv(18) / sv(0));
}

TEST_CASE("optimal core is a strict minimum and projects onto selected coordinates") {
    const Matrix I4 = Matrix::Identity(4, 4);
    const IndexSet p({0, 1}, 4), s({0, 1}, 4);
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = expect(1, 1) = 1.0;
    CHECK((cur::cur_opt(I4, p, s).reconstruct() - expect).norm() <= 1e-12);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Matrix A = random_matrix(20, 15, 300 + seed);
        const IndexSet ps({0, 3, 7, 9}, 20), ss({1, 2, 8, 11}, 15);
        const auto f = cur::cur_opt(A, ps, ss);
        const double base = (A - f.reconstruct()).norm();
        Matrix E = random_matrix(4, 4, 400 + seed);
        E *= 1e-3 / E.norm();
        const double moved = (A - f.Qc * (f.Z + E) * f.Qr.transpose()).norm();
        CHECK(moved > base);
    }
}

TEST_CASE("cur_cr_os with every index selected equals cur_opt") {
    const Matrix A = random_matrix(12, 9, 21);
    const IndexSet p({2, 5, 7}, 12), s({0, 4, 8}, 9);
    cur::CurOsOptions opts;
    opts.adaptive = false;
    opts.m_r0 = 12 - 3;
    opts.m_c0 = 9 - 3;
    const cur::CrossSupplier cross = [&](const IndexSet& pb, const IndexSet& sb) { return linalg::select(A, pb, sb); };
    const auto os = cur::cur_cr_os(linalg::select_cols(A, s), linalg::select_rows(A, p), p, s, cross, opts);
    const auto opt = cur::cur_opt(A, p, s);
    CHECK((os.factors.reconstruct() - opt.reconstruct()).norm() <= 1e-10);
    CHECK(os.indicators.eta_bar_p == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(os.indicators.eta_bar_s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cur_cr_os on the slow-decay toy") {
    models::ToySpec spec;
    spec.decay = models::Decay::slow;
    const Matrix A = models::toy_matrix(spec);
    const Index r = 40;
    const auto t = linalg::svd_truncated(A, r);
    const IndexSet p = sampling::qdeim(t.U), s = sampling::qdeim(t.V);
    const cur::CrossSupplier cross = [&](const IndexSet& pb, const IndexSet& sb) { return linalg::select(A, pb, sb); };
    const auto os = cur::cur_cr_os(linalg::select_cols(A, s), linalg::select_rows(A, p), p, s, cross);
    CHECK(os.indicators.eta_bar_p <= 10.0);
    CHECK(os.indicators.eta_bar_s <= 10.0);
    const Vector sv = linalg::singular_values(A);
    CHECK(linalg::spectral_norm(os.factors.reconstruct() - A) <= 10.0 * sv(r));
}

TEST_CASE("svd form of diagonal and identity cores") {
    const Matrix Qc = random_orthonormal(8, 3, 22), Qr = random_orthonormal(6, 3, 23);
    const auto id = cur::to_svd_form({Qc, Matrix::Identity(3, 3), Qr});
    CHECK((id.sigma - Vector::Ones(3)).norm() <= 1e-12);
    CHECK((id.U * id.sigma.asDiagonal() * id.Y.transpose() - Qc * Qr.transpose()).norm() <= 1e-12);

    Matrix Z = Matrix::Zero(3, 3);
    Z.diagonal() << 3.0, 2.0, 0.5;
    const auto dg = cur::to_svd_form({Qc, Z, Qr});
    CHECK((dg.sigma - Z.diagonal()).norm() <= 1e-12);
    CHECK((dg.U.cwiseAbs() - Qc.cwiseAbs()).norm() <= 1e-12);
}

TEST_CASE("exact indicators and bound arithmetic") {
    // The identity has no preferred singular basis below full rank, so use r = n.
    const auto [ep, es] = cur::eta_exact(Matrix::Identity(4, 4), IndexSet({2, 0, 3, 1}, 4), IndexSet({1, 3, 0, 2}, 4), 4);
    CHECK(ep == doctest::Approx(1.0));
    CHECK(es == doctest::Approx(1.0));
    Matrix D = Matrix::Zero(6, 5);
    D.diagonal() << 5.0, 4.0, 3.0, 2.0, 1.0;
    const auto [dp0, ds0] = cur::eta_exact(D, IndexSet::range(3, 6), IndexSet::range(3, 5), 3);
    CHECK(dp0 == doctest::Approx(1.0));
    CHECK(ds0 == doctest::Approx(1.0));
    CHECK(cur::error_bound(1.0, 1.0, 1.0, 1.0, 0.5) == doctest::Approx(1.0));
    CHECK(cur::error_bound(3.0, 7.0, 2.0, 5.0, 0.0) == 0.0);

    const Matrix A = random_matrix(80, 60, 24);
    const auto t = linalg::svd_truncated(A, 6);
    const IndexSet p = sampling::deim(t.U), s = sampling::deim(t.V);
    const auto [dp, ds] = cur::eta_exact(A, p, s, 6);
    CHECK(dp == doctest::Approx(linalg::spectral_norm(linalg::pinv(linalg::select_rows(t.U, p)))).epsilon(1e-8));
    CHECK(ds == doctest::Approx(linalg::spectral_norm(linalg::pinv(linalg::select_rows(t.V, s)))).epsilon(1e-8));
}

TEST_CASE("entry counts") {
    CHECK(cur::entry_count(100, 50, 5, 2, 3) == 731);
    CHECK(cur::entry_count(30, 20, 4, 0, 0) == 4 * (30 + 20) - 16);
    CHECK(cur::entry_count(7, 7, 7, 0, 0) == 49);
}

TEST_CASE("oblique projectors in the coordinate and full-oversampling limits") {
    const Matrix I = Matrix::Identity(6, 6);
    const IndexSet p({1, 4}, 6);
    const auto f = cur::oblique_projection_forms(I, p, p, p, p);
    Matrix D = Matrix::Zero(6, 6);
    D(1, 1) = D(4, 4) = 1.0;
    CHECK((f.P_basis - D).norm() <= 1e-12);
    CHECK((f.P_elem - D).norm() <= 1e-12);
    CHECK((f.S_basis - D).norm() <= 1e-12);
    CHECK((f.S_elem - D).norm() <= 1e-12);

    const Matrix A = random_matrix(10, 8, 25);
    const IndexSet pa({2, 6, 9}, 10), sa({1, 5, 7}, 8);
    const auto g = cur::oblique_projection_forms(A, pa, sa, IndexSet::range(10, 10), IndexSet::range(8, 8));
    const Matrix Qc = linalg::thin_qr(linalg::select_cols(A, sa)).Q;
    CHECK((g.P_basis - Qc * Qc.transpose()).norm() <= 1e-10);
    CHECK(linalg::spectral_norm(g.P_basis) == doctest::Approx(1.0));
}

// ---------------------------------------------------------------- integrator

TEST_CASE("zero dynamics keep the state and lower the rank each step") {
    const Matrix A = random_matrix(30, 20, 26);
    const LowRankState X0 = LowRankState::from_matrix(A, 4);
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    cfg.t_final = 0.6;
    cfg.scheme = Scheme::euler;
    cfg.r0 = 4;
    const ZeroRhs zero(30, 20);
    std::vector<Index> ranks;
    // With F = 0 each step returns the previous state, cut to the lowered rank.
    const auto run = integrate_tdb(zero, X0, cfg, [&](const LowRankState& X, const StepDiagnostics& d) {
        CHECK(d.eps_proxy <= 1e-14 * X0.sigma(0));
        ranks.push_back(d.rank);
        CHECK((X.materialize() - X0.truncated(d.rank).materialize()).norm() <= 1e-10);
    });
    CHECK(ranks == std::vector<Index>{3, 2, 1, 1, 1, 1});
}

TEST_CASE("rk4 on scalar decay reaches exp(-1)") {
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.scheme = Scheme::rk4;
    const ScalarDecay rhs;
    const auto traj = fom_integrate(rhs, Matrix::Ones(1, 1), cfg);
    CHECK(std::abs(traj.states.back()(0, 0) - std::exp(-1.0)) <= 1e-10);

    const auto still = fom_integrate(ScalarDecay{}, Matrix::Zero(2, 2), cfg);
    CHECK(still.states.back().norm() == 0.0);
}

TEST_CASE("rk4 is fourth order on deterministic Burgers") {
    models::SpdeSpec spec = models::SpdeSpec::desk(models::SpdeKind::burgers);
    spec.sigma = 0.0;
    spec.s = 1;
    const models::SpdeModel model(spec);
    const Matrix A0 = model.initial_full();
    std::vector<Matrix> finals;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.t_final = 0.2;
        cfg.scheme = Scheme::rk4;
        cfg.checkpoint_every = 1000000;
        finals.push_back(fom_integrate(model, A0, cfg).states.back());
    }
    const double order = std::log2((finals[0] - finals[1]).norm() / (finals[1] - finals[2]).norm());
    CHECK(order == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("probe count uses the fraction with a floor of one") {
    const Matrix U = random_orthonormal(400, 3, 27), Y = random_orthonormal(400, 3, 28);
    CHECK(rank_probe_indices(U, Y, 3, 0.01).mbar_r == 4);
    const Matrix U50 = random_orthonormal(50, 3, 29), Y50 = random_orthonormal(50, 3, 30);
    CHECK(rank_probe_indices(U50, Y50, 3, 0.01).mbar_r == 1);
    const auto full = rank_probe_indices(U50, Y50, 3, 1.0);
    CHECK(full.p.size() == 50);
    CHECK(full.s.size() == 50);
}

// ---------------------------------------------------------------- models

TEST_CASE("squared-exponential kernel limits and trace") {
    Vector x(64);
    for (Index i = 0; i < 64; ++i) x(i) = double(i) / 63.0;
    const Matrix K = models::se_kernel(x, 0.1);
    CHECK((K.diagonal() - Vector::Ones(64)).norm() == 0.0);
    const auto kl = models::se_kernel_kl(x, 0.1, 64);
    CHECK(kl.lambda.sum() == doctest::Approx(64.0).epsilon(1e-10));

    const auto wide = models::se_kernel_kl(x, 1e4, 3);
    CHECK(wide.lambda(0) == doctest::Approx(64.0).epsilon(1e-6));
    CHECK(std::abs(wide.lambda(1)) <= 1e-6);
}

TEST_CASE("Burgers initial condition without noise") {
    models::SpdeSpec spec = models::SpdeSpec::desk(models::SpdeKind::burgers);
    spec.sigma = 0.0;
    const models::SpdeModel model(spec);
    const Matrix A = model.initial_full();
    CHECK(model.grid()(25) == doctest::Approx(0.25));
    CHECK(A(25, 0) == doctest::Approx(-0.25).epsilon(1e-12));
    for (Index j = 1; j < A.cols(); ++j) CHECK(A.col(j) == A.col(0));
    CHECK(linalg::singular_values(A)(1) <= 1e-12 * linalg::singular_values(A)(0));
}

TEST_CASE("constant states are fixed points of Allen-Cahn and KdV") {
    for (const auto kind : {models::SpdeKind::allen_cahn, models::SpdeKind::kdv}) {
        models::SpdeSpec spec = models::SpdeSpec::desk(kind);
        spec.s = 3;
        const models::SpdeModel model(spec);
        const std::vector<double> levels = kind == models::SpdeKind::allen_cahn ? std::vector<double>{0.0, 1.0}
                                                                                 : std::vector<double>{0.0, 0.7};
        for (double c : levels) {
            const Matrix F = model.eval_full(Matrix::Constant(spec.n, 3, c), 0.0);
            CHECK(F.cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("KdV initial peak and mass conservation") {
    models::SpdeSpec spec = models::SpdeSpec::desk(models::SpdeKind::kdv);
    spec.n = 500;
    spec.s = 2;
    spec.sigma = 0.0;
    const models::SpdeModel model(spec);
    const Matrix A0 = model.initial_full();
    const double c = std::cosh(20.0);
    CHECK(A0(100, 0) == doctest::Approx(std::log(1.0 + c * c) / 40.0).epsilon(1e-12));

    IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_final = 0.1;
    cfg.scheme = Scheme::rk4;
    cfg.checkpoint_every = 100;
    const auto traj = fom_integrate(model, A0, cfg);
    CHECK(traj.step.back() == 1000);
    const double m0 = A0.col(0).sum();
    for (const Matrix& S : traj.states) CHECK(std::abs(S.col(0).sum() - m0) <= 1e-6 * std::abs(m0));
}

TEST_CASE("lumping a diagonal mass is the identity and sums are kept") {
    Matrix D = Matrix::Zero(3, 3);
    D.diagonal() << 1.0, 2.0, 3.0;
    CHECK((models::lump_mass(D) - D.diagonal()).norm() <= 1e-15);

    Matrix M = Matrix::Zero(50, 50);
    for (Index i = 0; i < 49; ++i) {
        const double h = 0.5 + 0.01 * double(i);
        M(i, i) += h / 3.0;
        M(i + 1, i + 1) += h / 3.0;
        M(i, i + 1) += h / 6.0;
        M(i + 1, i) += h / 6.0;
    }
    CHECK(models::lump_mass(M).sum() == doctest::Approx(M.sum()).epsilon(1e-12));
}

// ---------------------------------------------------------------- emit

TEST_CASE("emit writes a header for no records and rejects unknown formats") {
    const auto path = std::filesystem::temp_directory_path() / ("curos_emit_" + std::to_string(::getpid()) + ".csv");
    emit::emit({}, "csv", path.string());
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    CHECK(lines.size() == 1);
    CHECK(emit::read_metrics_csv(path.string()).empty());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(emit::emit({}, "xml", path.string()), ArgumentError);
}
