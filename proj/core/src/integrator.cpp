#include "curos/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "curos/entry_tally.hpp"
#include "curos/errors.hpp"
#include "curos/sampling.hpp"

namespace curos::integrator {

namespace {

void require_finite(const Matrix& M, const char* what, long step) {
    if (!M.allFinite()) throw BlowUpError(std::string("non-finite values in ") + what, step);
}

void require_finite(const LowRankState& X, const char* what, long step) {
    if (!X.U.allFinite() || !X.sigma.allFinite() || !X.Y.allFinite())
        throw BlowUpError(std::string("non-finite values in ") + what, step);
}

Index probe_size(double fraction, Index dim) {
    const auto m = static_cast<Index>(std::llround(fraction * static_cast<double>(dim)));
    return std::max<Index>(1, m);
}

Index count_common(const IndexSet& a, Index skip_a, const IndexSet& b, Index skip_b) {
    Index c = 0;
    for (Index k = skip_a; k < a.size(); ++k) {
        for (Index l = skip_b; l < b.size(); ++l)
            if (a[k] == b[l]) {
                ++c;
                break;
            }
    }
    return c;
}

// F evaluated at one stage state, restricted to the base columns and rows.
struct Stage {
    LowRankState X;
    double t = 0.0;
    Matrix Fc; // F(X)(:, s)
    Matrix Fr; // F(X)(p, :)
};

} // namespace

long IntegratorConfig::steps() const {
    return static_cast<long>(std::llround(t_final / dt));
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("integrator: dt must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ArgumentError("integrator: t_final must be positive");
    if (steps() < 1) throw ArgumentError("integrator: t_final / dt must be at least one step");
    if (!(eps_os > 1.0)) throw ArgumentError("integrator: eps_os must exceed 1");
    if (!(eps_l >= 0.0) || !(eps_u >= eps_l)) throw ArgumentError("integrator: need 0 <= eps_l <= eps_u");
    if (r0 < 1) throw ArgumentError("integrator: r0 must be at least 1");
    if (!(rank_probe_fraction > 0.0) || rank_probe_fraction > 1.0)
        throw ArgumentError("integrator: rank_probe_fraction must lie in (0, 1]");
    if (max_rank_jump < 1) throw ArgumentError("integrator: max_rank_jump must be at least 1");
    if (max_rank < 0 || m_r0 < 0 || m_c0 < 0) throw ArgumentError("integrator: negative size parameter");
    if (checkpoint_every < 1) throw ArgumentError("integrator: checkpoint_every must be at least 1");
}

ProbeSets rank_probe_indices(const Matrix& U, const Matrix& Y, Index r, double fraction, const IndexSet* p_base,
                             const IndexSet* s_base) {
    const Index n = U.rows();
    const Index ns = Y.rows();
    if (r < 1 || r > std::min(n, ns)) throw ArgumentError("rank_probe_indices: r out of range");
    if (!(fraction > 0.0) || fraction > 1.0) throw ArgumentError("rank_probe_indices: fraction must lie in (0, 1]");

    ProbeSets out;
    out.mbar_r = probe_size(fraction, n);
    out.mbar_c = probe_size(fraction, ns);
    if (r + out.mbar_r > n) {
        out.mbar_r = n - r;
        out.clamped = true;
    }
    if (r + out.mbar_c > ns) {
        out.mbar_c = ns - r;
        out.clamped = true;
    }
    auto row_sel = p_base ? sampling::GreedyOversampler(U, *p_base) : sampling::GreedyOversampler(U);
    auto col_sel = s_base ? sampling::GreedyOversampler(Y, *s_base) : sampling::GreedyOversampler(Y);
    out.p = row_sel.first(r + out.mbar_r);
    out.s = col_sel.first(r + out.mbar_c);
    return out;
}

StepResult tdb_step(const LowRankState& state, const RhsOracle& oracle, double t, const IntegratorConfig& cfg,
                    const TdbCarry& carry, long step_index) {
    const auto t_start = std::chrono::steady_clock::now();
    const long long dense_before = LowRankState::materialize_calls();
    const Index n = oracle.rows();
    const Index ns = oracle.cols();
    if (state.rows() != n || state.cols() != ns) throw ArgumentError("tdb_step: state does not match the oracle");
    if (state.rank() < 1) throw ArgumentError("tdb_step: empty state");

    Index rmax = std::min(n, ns);
    if (cfg.max_rank > 0) rmax = std::min(rmax, cfg.max_rank);
    const Index r = std::clamp<Index>(carry.target_rank, 1, rmax);
    const LowRankState base = state.rank() > r ? state.truncated(r) : state;

    // Base samples: QDEIM on the current factors, extended greedily when the
    // target rank exceeds the stored rank.
    const IndexSet p = sampling::GreedyOversampler(base.U).first(r);
    const IndexSet s = sampling::GreedyOversampler(base.Y).first(r);
    const ProbeSets probe = rank_probe_indices(base.U, base.Y, r, cfg.rank_probe_fraction, &p, &s);

    std::vector<Stage> stages;
    std::vector<EntryTally> tallies;
    auto add_stage = [&](LowRankState X, double ts) {
        Stage st;
        st.X = std::move(X);
        st.t = ts;
        st.Fc = oracle.eval_cols(st.X, ts, s);
        st.Fr = oracle.eval_rows(st.X, ts, p);
        if (st.Fc.rows() != n || st.Fc.cols() != r || st.Fr.rows() != r || st.Fr.cols() != ns)
            throw ArgumentError("tdb_step: oracle returned blocks of the wrong shape");
        require_finite(st.Fc, "F(:, s)", step_index);
        require_finite(st.Fr, "F(p, :)", step_index);
        EntryTally tally(n, ns);
        tally.add_rows(p);
        tally.add_cols(s);
        stages.push_back(std::move(st));
        tallies.push_back(std::move(tally));
    };

    // A_hat + sum_i c_i F(X_i), restricted to a cross block.
    auto cross_of = [&](const std::vector<double>& c) {
        return [&, c](const IndexSet& pb, const IndexSet& sb) {
            Matrix M = base.block(pb, sb);
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (c[i] == 0.0) continue;
                const Matrix K = oracle.eval_cross(stages[i].X, stages[i].t, pb, sb);
                if (K.rows() != pb.size() || K.cols() != sb.size())
                    throw ArgumentError("tdb_step: oracle cross block has the wrong shape");
                require_finite(K, "F(p_bar, s_bar)", step_index);
                tallies[i].add_block(pb, sb);
                M += c[i] * K;
            }
            return M;
        };
    };

    const cur::CurOsOptions os_opts{carry.indicators.m_r, carry.indicators.m_c, cfg.eps_os,
                                    cfg.adaptive_oversampling};
    auto compress = [&](const std::vector<double>& c) {
        Matrix cols = base.col_block(s);
        Matrix rows = base.row_block(p);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] == 0.0) continue;
            cols += c[i] * stages[i].Fc;
            rows += c[i] * stages[i].Fr;
        }
        return cur::cur_cr_os(cols, rows, p, s, cross_of(c), os_opts);
    };

    const double dt = cfg.dt;
    std::vector<double> final_c;
    add_stage(base, t);
    if (cfg.scheme == Scheme::euler) {
        final_c = {dt};
    } else {
        LowRankState Y2 = cur::to_svd_form(compress({0.5 * dt}).factors);
        require_finite(Y2, "stage 2 state", step_index);
        add_stage(std::move(Y2), t + 0.5 * dt);
        LowRankState Y3 = cur::to_svd_form(compress({0.0, 0.5 * dt}).factors);
        require_finite(Y3, "stage 3 state", step_index);
        add_stage(std::move(Y3), t + 0.5 * dt);
        LowRankState Y4 = cur::to_svd_form(compress({0.0, 0.0, dt}).factors);
        require_finite(Y4, "stage 4 state", step_index);
        add_stage(std::move(Y4), t + dt);
        final_c = {dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0};
    }

    const cur::CurOsResult fin = compress(final_c);
    LowRankState next = cur::to_svd_form(fin.factors);
    require_finite(next, "updated state", step_index);

    // Rank proxy: residual on the probe block, normalised by its size.
    const Matrix probe_exact = cross_of(final_c)(probe.p, probe.s);
    const double eps_proxy = (probe_exact - next.block(probe.p, probe.s)).norm() /
                             static_cast<double>(probe.p.size() * probe.s.size());

    if (LowRankState::materialize_calls() != dense_before)
        throw std::logic_error("tdb_step: the dense state was materialized during a CUR step");

    StepResult out;
    Index next_rank = r;
    if (eps_proxy > cfg.eps_u) {
        next_rank = std::min(r + cfg.max_rank_jump, rmax);
    } else if (eps_proxy < cfg.eps_l && r > 1) {
        next_rank = r - 1;
        next = next.truncated(next_rank);
    }
    out.state = std::move(next);
    out.carry.target_rank = next_rank;
    out.carry.indicators = fin.indicators;

    StepDiagnostics& d = out.diag;
    d.step = step_index;
    d.t = t + dt;
    d.sampled_rank = r;
    d.rank = out.state.rank();
    d.next_rank = next_rank;
    d.m_r = fin.indicators.m_r;
    d.m_c = fin.indicators.m_c;
    d.mbar_r = probe.mbar_r;
    d.mbar_c = probe.mbar_c;
    d.eps_proxy = eps_proxy;
    d.eta_bar_p = fin.indicators.eta_bar_p;
    d.eta_bar_s = fin.indicators.eta_bar_s;
    d.oversampling_bound_hit = fin.indicators.bound_hit();
    for (const auto& tally : tallies) d.entries_accessed += tally.count();
    d.p = p;
    d.s = s;
    d.p_bar = fin.p_bar;
    d.s_bar = fin.s_bar;
    d.p_probe = probe.p;
    d.s_probe = probe.s;
    d.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

long long euler_entry_budget(Index n, Index s, const StepDiagnostics& d) {
    const Index r = d.sampled_rank;
    const Index overlap_r = count_common(d.p_probe, r, d.p_bar, r);
    const Index overlap_c = count_common(d.s_probe, r, d.s_bar, r);
    return cur::entry_count(n, s, r, d.m_r, d.m_c) + static_cast<long long>(d.mbar_r) * d.mbar_c -
           static_cast<long long>(overlap_r) * overlap_c;
}

TdbRun integrate_tdb(const RhsOracle& oracle, LowRankState initial, const IntegratorConfig& cfg,
                     const StepObserver& observer) {
    cfg.validate();
    TdbRun run;
    TdbCarry carry;
    carry.target_rank = initial.rank();
    carry.indicators.m_r = cfg.m_r0;
    carry.indicators.m_c = cfg.m_c0;
    run.final_state = std::move(initial);

    const long nsteps = cfg.steps();
    run.diagnostics.reserve(static_cast<std::size_t>(nsteps));
    for (long k = 1; k <= nsteps; ++k) {
        const double t = static_cast<double>(k - 1) * cfg.dt;
        StepResult res = tdb_step(run.final_state, oracle, t, cfg, carry, k);
        run.final_state = std::move(res.state);
        carry = res.carry;
        if (observer) observer(run.final_state, res.diag);
        run.diagnostics.push_back(std::move(res.diag));
    }
    return run;
}

namespace {

Matrix full_step(const FullRhs& model, const Matrix& A, double t, double dt, Scheme scheme) {
    if (scheme == Scheme::euler) return A + dt * model.eval_full(A, t);
    const Matrix k1 = model.eval_full(A, t);
    const Matrix k2 = model.eval_full(A + 0.5 * dt * k1, t + 0.5 * dt);
    const Matrix k3 = model.eval_full(A + 0.5 * dt * k2, t + 0.5 * dt);
    const Matrix k4 = model.eval_full(A + dt * k3, t + dt);
    return A + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

void fom_integrate(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg,
                   const FullObserver& observer) {
    cfg.validate();
    Matrix A = A0;
    if (observer) observer(0, 0.0, A);
    const long nsteps = cfg.steps();
    for (long k = 1; k <= nsteps; ++k) {
        A = full_step(model, A, static_cast<double>(k - 1) * cfg.dt, cfg.dt, cfg.scheme);
        require_finite(A, "full-order state", k);
        if (observer && (k % cfg.checkpoint_every == 0 || k == nsteps))
            observer(k, static_cast<double>(k) * cfg.dt, A);
    }
}

Trajectory fom_integrate(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg) {
    Trajectory tr;
    fom_integrate(model, A0, cfg, [&](long k, double t, const Matrix& A) {
        tr.step.push_back(k);
        tr.t.push_back(t);
        tr.states.push_back(A);
    });
    return tr;
}

void svd_step_reference(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg,
                        const std::function<Index(long)>& rank_schedule, const LowRankObserver& observer) {
    cfg.validate();
    if (!rank_schedule) throw ArgumentError("svd_step_reference: missing rank schedule");
    const Index rmax = std::min(A0.rows(), A0.cols());
    auto rank_at = [&](long k) { return std::clamp<Index>(rank_schedule(k), 1, rmax); };

    LowRankState X = LowRankState::from_matrix(A0, rank_at(0));
    if (observer) observer(0, 0.0, X);
    const long nsteps = cfg.steps();
    for (long k = 1; k <= nsteps; ++k) {
        const Matrix B = full_step(model, X.materialize(), static_cast<double>(k - 1) * cfg.dt, cfg.dt, cfg.scheme);
        require_finite(B, "step-truncated state", k);
        X = LowRankState::from_matrix(B, rank_at(k));
        if (observer && (k % cfg.checkpoint_every == 0 || k == nsteps))
            observer(k, static_cast<double>(k) * cfg.dt, X);
    }
}

LowRankTrajectory svd_step_reference(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg,
                                     const std::function<Index(long)>& rank_schedule) {
    LowRankTrajectory tr;
    svd_step_reference(model, A0, cfg, rank_schedule, [&](long k, double t, const LowRankState& X) {
        tr.step.push_back(k);
        tr.t.push_back(t);
        tr.states.push_back(X);
    });
    return tr;
}

} // namespace curos::integrator
