#include "curos/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include "json.hpp"

#include "curos/cur.hpp"
#include "curos/errors.hpp"
#include "curos/sampling.hpp"

#ifndef CUROS_VERSION
#define CUROS_VERSION "0.0.0"
#endif

namespace curos::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

using emit::MetricRecord;
using emit::number;

const std::set<std::string> kCommonKeys = {"seed", "method", "output_dir", "sv_count"};
const std::set<std::string> kIntegratorKeys = {
    "dt",  "t_final",  "eps_os",       "eps_u",        "eps_l", "rank", "scheme", "rank_probe_fraction",
    "max_rank_jump", "max_rank", "adaptive_oversampling", "m_r0", "m_c0", "checkpoint_every"};
const std::set<std::string> kToyKeys = {"n", "decay", "max_rank", "eps_os"};
const std::set<std::string> kSpdeKeys = {"scale", "n", "s", "d", "coeff", "nu", "gamma", "sigma", "ell"};
const std::set<std::string> kHeatKeys = {"s",          "h",          "k",           "rho",          "c_p",
                                         "corner_min", "corner_max", "t_inf",       "eps_rad",      "sigma_sb",
                                         "mass_mtx",   "stiffness_mtx", "coupling_mtx", "g_file", "boundary_file",
                                         "reference",  "initial"};

const std::set<std::string> kToyMethods = {"cur_cr_deim", "cur_cr_maxvol", "cur_cr_os", "cur_opt", "svd", "all"};
const std::set<std::string> kTimeMethods = {"cur_cr_os", "cur_cr", "cur_cr_deim", "svd", "fom"};

std::string decay_name(models::Decay d) { return d == models::Decay::fast ? "fast" : "slow"; }

bool is_checkpoint(long k, long nsteps, long every) { return k == 0 || k % every == 0 || k == nsteps; }

void apply_integrator_keys(integrator::IntegratorConfig& ic, const KeyValues& kv) {
    ic.dt = kv.get_double("dt", ic.dt);
    ic.t_final = kv.get_double("t_final", ic.t_final);
    ic.eps_os = kv.get_double("eps_os", ic.eps_os);
    ic.eps_u = kv.get_double("eps_u", ic.eps_u);
    // Lower threshold defaults to four decades below the upper one.
    ic.eps_l = kv.get_double("eps_l", 1e-4 * ic.eps_u);
    ic.r0 = kv.get_int("rank", ic.r0);
    const std::string scheme = kv.get_string("scheme", ic.scheme == integrator::Scheme::rk4 ? "rk4" : "euler");
    if (scheme == "rk4")
        ic.scheme = integrator::Scheme::rk4;
    else if (scheme == "euler")
        ic.scheme = integrator::Scheme::euler;
    else
        throw ArgumentError("config: scheme must be 'euler' or 'rk4'");
    ic.rank_probe_fraction = kv.get_double("rank_probe_fraction", ic.rank_probe_fraction);
    ic.max_rank_jump = kv.get_int("max_rank_jump", ic.max_rank_jump);
    ic.max_rank = kv.get_int("max_rank", ic.max_rank);
    ic.adaptive_oversampling = kv.get_bool("adaptive_oversampling", ic.adaptive_oversampling);
    ic.m_r0 = kv.get_int("m_r0", ic.m_r0);
    ic.m_c0 = kv.get_int("m_c0", ic.m_c0);
    ic.checkpoint_every = kv.get_int("checkpoint_every", ic.checkpoint_every);
}

void record_integrator(KeyValues& out, const integrator::IntegratorConfig& ic) {
    out.set("dt", number(ic.dt));
    out.set("t_final", number(ic.t_final));
    out.set("eps_os", number(ic.eps_os));
    out.set("eps_u", number(ic.eps_u));
    out.set("eps_l", number(ic.eps_l));
    out.set("rank", std::to_string(ic.r0));
    out.set("scheme", ic.scheme == integrator::Scheme::rk4 ? "rk4" : "euler");
    out.set("rank_probe_fraction", number(ic.rank_probe_fraction));
    out.set("max_rank_jump", std::to_string(ic.max_rank_jump));
    out.set("max_rank", std::to_string(ic.max_rank));
    out.set("adaptive_oversampling", ic.adaptive_oversampling ? "true" : "false");
    out.set("m_r0", std::to_string(ic.m_r0));
    out.set("m_c0", std::to_string(ic.m_c0));
    out.set("checkpoint_every", std::to_string(ic.checkpoint_every));
}

} // namespace

Experiment parse_experiment(const std::string& name) {
    if (name == "toy") return Experiment::toy;
    if (name == "burgers") return Experiment::burgers;
    if (name == "allen-cahn" || name == "allen_cahn") return Experiment::allen_cahn;
    if (name == "kdv") return Experiment::kdv;
    if (name == "heat") return Experiment::heat;
    throw ArgumentError("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
    switch (e) {
    case Experiment::toy: return "toy";
    case Experiment::burgers: return "burgers";
    case Experiment::allen_cahn: return "allen-cahn";
    case Experiment::kdv: return "kdv";
    case Experiment::heat: return "heat";
    }
    return "unknown";
}

std::string version() { return CUROS_VERSION; }

std::set<std::string> known_keys(Experiment e) {
    std::set<std::string> keys = kCommonKeys;
    if (e == Experiment::toy) {
        keys.insert(kToyKeys.begin(), kToyKeys.end());
        return keys;
    }
    keys.insert(kIntegratorKeys.begin(), kIntegratorKeys.end());
    if (e == Experiment::heat)
        keys.insert(kHeatKeys.begin(), kHeatKeys.end());
    else
        keys.insert(kSpdeKeys.begin(), kSpdeKeys.end());
    return keys;
}

ExperimentConfig resolve_config(Experiment e, const KeyValues& kv) {
    kv.require_known(known_keys(e));
    ExperimentConfig cfg;
    cfg.experiment = e;
    cfg.seed = kv.get_uint("seed", cfg.seed);
    cfg.output_dir = kv.get_string("output_dir", cfg.output_dir);
    cfg.method = kv.get_string("method", cfg.method);
    cfg.sv_count = kv.get_int("sv_count", cfg.sv_count);
    if (cfg.sv_count < 1) throw ArgumentError("config: sv_count must be positive");

    KeyValues& out = cfg.resolved;
    out.set("experiment", to_string(e));
    out.set("seed", std::to_string(cfg.seed));
    out.set("output_dir", cfg.output_dir);
    out.set("method", cfg.method);
    out.set("sv_count", std::to_string(cfg.sv_count));

    if (e == Experiment::toy) {
        if (!kToyMethods.count(cfg.method)) throw ArgumentError("method '" + cfg.method + "' is not valid for toy");
        cfg.toy.n = kv.get_int("n", cfg.toy.n);
        if (cfg.toy.n < 2) throw ArgumentError("config: toy n must be at least 2");
        const std::string decay = kv.get_string("decay", "both");
        if (decay == "fast")
            cfg.toy.decays = {models::Decay::fast};
        else if (decay == "slow")
            cfg.toy.decays = {models::Decay::slow};
        else if (decay != "both")
            throw ArgumentError("config: decay must be fast, slow or both");
        cfg.toy.max_rank = kv.get_int("max_rank", cfg.toy.n - 1);
        if (cfg.toy.max_rank < 1 || cfg.toy.max_rank > cfg.toy.n)
            throw ArgumentError("config: toy max_rank must lie in [1, n]");
        cfg.integ.eps_os = kv.get_double("eps_os", cfg.integ.eps_os);
        if (!(cfg.integ.eps_os > 1.0)) throw ArgumentError("config: eps_os must exceed 1");
        out.set("n", std::to_string(cfg.toy.n));
        out.set("decay", decay);
        out.set("max_rank", std::to_string(cfg.toy.max_rank));
        out.set("eps_os", number(cfg.integ.eps_os));
        return cfg;
    }

    if (!kTimeMethods.count(cfg.method))
        throw ArgumentError("method '" + cfg.method + "' is not valid for " + to_string(e));

    if (e == Experiment::heat) {
        HeatOptions& h = cfg.heat;
        h.s = kv.get_int("s", h.s);
        h.geometry.h = kv.get_double("h", h.geometry.h);
        h.geometry.k = kv.get_double("k", h.geometry.k);
        h.geometry.rho = kv.get_double("rho", h.geometry.rho);
        h.geometry.c_p = kv.get_double("c_p", h.geometry.c_p);
        h.corner_min = kv.get_double("corner_min", h.corner_min);
        h.corner_max = kv.get_double("corner_max", h.corner_max);
        h.T_inf = kv.get_double("t_inf", h.T_inf);
        h.eps_rad = kv.get_double("eps_rad", h.eps_rad);
        h.sigma_sb = kv.get_double("sigma_sb", h.sigma_sb);
        h.mass_mtx = kv.get_string("mass_mtx", "");
        h.stiffness_mtx = kv.get_string("stiffness_mtx", "");
        h.coupling_mtx = kv.get_string("coupling_mtx", "");
        h.g_file = kv.get_string("g_file", "");
        h.boundary_file = kv.get_string("boundary_file", "");
        h.reference = kv.get_bool("reference", h.reference);
        h.initial = kv.get_string("initial", h.initial);
        if (h.initial != "bilinear" && h.initial != "ambient")
            throw ArgumentError("config: heat initial must be 'bilinear' or 'ambient'");
        const bool any_file = !h.mass_mtx.empty() || !h.stiffness_mtx.empty() || !h.coupling_mtx.empty() ||
                              !h.g_file.empty() || !h.boundary_file.empty();
        const bool all_files = !h.mass_mtx.empty() && !h.stiffness_mtx.empty() && !h.coupling_mtx.empty() &&
                               !h.g_file.empty() && !h.boundary_file.empty();
        if (any_file && !all_files)
            throw ArgumentError("config: heat input files must be given together "
                                "(mass_mtx, stiffness_mtx, coupling_mtx, g_file, boundary_file)");
        if (h.s < 1) throw ArgumentError("config: heat s must be positive");

        const double tf = models::heat_time_scale(h.geometry);
        cfg.integ.dt = tf / 8000.0;
        cfg.integ.t_final = tf;
        // The bilinear start has rank 4; leave headroom for the cylinder response.
        cfg.integ.r0 = 10;
        cfg.integ.eps_u = 1e-8;
        apply_integrator_keys(cfg.integ, kv);

        out.set("s", std::to_string(h.s));
        out.set("h", number(h.geometry.h));
        out.set("k", number(h.geometry.k));
        out.set("rho", number(h.geometry.rho));
        out.set("c_p", number(h.geometry.c_p));
        out.set("corner_min", number(h.corner_min));
        out.set("corner_max", number(h.corner_max));
        out.set("t_inf", number(h.T_inf));
        out.set("eps_rad", number(h.eps_rad));
        out.set("sigma_sb", number(h.sigma_sb));
        out.set("mass_mtx", h.mass_mtx);
        out.set("stiffness_mtx", h.stiffness_mtx);
        out.set("coupling_mtx", h.coupling_mtx);
        out.set("g_file", h.g_file);
        out.set("boundary_file", h.boundary_file);
        out.set("reference", h.reference ? "true" : "false");
        out.set("initial", h.initial);
    } else {
        const models::SpdeKind kind = e == Experiment::burgers      ? models::SpdeKind::burgers
                                      : e == Experiment::allen_cahn ? models::SpdeKind::allen_cahn
                                                                    : models::SpdeKind::kdv;
        const std::string scale = kv.get_string("scale", "desk");
        if (scale == "desk")
            cfg.spde = models::SpdeSpec::desk(kind);
        else if (scale == "reference")
            cfg.spde = models::SpdeSpec::reference(kind);
        else
            throw ArgumentError("config: scale must be 'desk' or 'reference'");
        models::SpdeSpec& sp = cfg.spde;
        sp.n = kv.get_int("n", sp.n);
        sp.s = kv.get_int("s", sp.s);
        sp.d = kv.get_int("d", sp.d);
        sp.coeff = kv.get_double("coeff", sp.coeff);
        sp.coeff = kv.get_double(kind == models::SpdeKind::kdv ? "gamma" : "nu", sp.coeff);
        sp.sigma = kv.get_double("sigma", sp.sigma);
        sp.ell = kv.get_double("ell", sp.ell);
        sp.seed = cfg.seed;

        cfg.integ.dt = sp.dt;
        cfg.integ.t_final = sp.t_final;
        // The stochastic initial data has rank d + 1.
        cfg.integ.r0 = std::min(sp.d + 1, std::min(sp.n, sp.s));
        cfg.integ.eps_u = 1e-8;
        apply_integrator_keys(cfg.integ, kv);
        sp.dt = cfg.integ.dt;
        sp.t_final = cfg.integ.t_final;
        sp.validate();

        out.set("scale", scale);
        out.set("n", std::to_string(sp.n));
        out.set("s", std::to_string(sp.s));
        out.set("d", std::to_string(sp.d));
        out.set("coeff", number(sp.coeff));
        out.set("sigma", number(sp.sigma));
        out.set("ell", number(sp.length_scale()));
    }
    cfg.integ.validate();
    if (cfg.integ.dt > cfg.integ.t_final) throw ArgumentError("config: dt must not exceed t_final");
    record_integrator(out, cfg.integ);
    return cfg;
}

// ---------------------------------------------------------------- toy

namespace {

struct ToyApprox {
    Matrix A_hat;
    double eta_p = kNaN, eta_s = kNaN;
    Index m_r = 0, m_c = 0;
    long long entries = 0;
};

double inv_sigma_min(const Matrix& M) {
    const double smin = linalg::smallest_singular_value(M);
    return smin > 0.0 ? 1.0 / smin : kInf;
}

ToyApprox toy_approx(const std::string& method, const Matrix& A, const linalg::TruncatedSvd& full, Index r,
                     double eps_os) {
    const Index n = A.rows();
    const Index ns = A.cols();
    ToyApprox out;
    if (method == "svd") {
        out.A_hat = full.U.leftCols(r) * full.sigma.head(r).asDiagonal() * full.V.leftCols(r).transpose();
        out.entries = static_cast<long long>(n) * ns;
        return out;
    }
    const Matrix Ur = full.U.leftCols(r);
    const Matrix Vr = full.V.leftCols(r);
    IndexSet p, s;
    if (method == "cur_cr_maxvol") {
        p = sampling::maxvol(Ur);
        s = sampling::maxvol(Vr);
    } else {
        p = sampling::deim(Ur);
        s = sampling::deim(Vr);
    }
    const Matrix cols = linalg::select_cols(A, s);
    const Matrix rows = linalg::select_rows(A, p);
    if (method == "cur_opt") {
        out.A_hat = cur::cur_opt(A, p, s).reconstruct();
        out.entries = static_cast<long long>(n) * ns;
    } else if (method == "cur_cr_os") {
        const auto res = cur::cur_cr_os(cols, rows, p, s,
                                        [&](const IndexSet& a, const IndexSet& b) { return linalg::select(A, a, b); },
                                        {0, 0, eps_os, true});
        out.A_hat = res.factors.reconstruct();
        out.eta_p = res.indicators.eta_bar_p;
        out.eta_s = res.indicators.eta_bar_s;
        out.m_r = res.indicators.m_r;
        out.m_c = res.indicators.m_c;
        out.entries = cur::entry_count(n, ns, r, out.m_r, out.m_c);
    } else {
        const auto f = cur::cur_cr(cols, rows, linalg::select(A, p, s));
        out.A_hat = f.reconstruct();
        out.eta_p = inv_sigma_min(linalg::select_rows(f.Qc, p));
        out.eta_s = inv_sigma_min(linalg::select_rows(f.Qr, s));
        out.entries = cur::entry_count(n, ns, r, 0, 0);
    }
    return out;
}

} // namespace

RunResult run_toy(const ExperimentConfig& cfg) {
    RunResult res;
    res.singular_values.header = {"label", "k", "sigma"};
    std::vector<std::string> methods;
    if (cfg.method == "all")
        methods = {"cur_cr_deim", "cur_cr_maxvol", "cur_cr_os", "cur_opt", "svd"};
    else if (cfg.method == "svd")
        methods = {"svd"};
    else
        methods = {cfg.method, "svd"};

    for (models::Decay decay : cfg.toy.decays) {
        const Matrix A = models::toy_matrix({cfg.toy.n, decay, cfg.seed});
        const Index n = A.rows();
        const auto full = linalg::svd_truncated(A, n);
        const double normA = full.sigma(0);
        for (Index k = 0; k < n; ++k)
            res.singular_values.add({decay_name(decay), std::to_string(k + 1), number(full.sigma(k))});

        for (const auto& method : methods) {
            for (Index r = 1; r <= cfg.toy.max_rank; ++r) {
                MetricRecord rec;
                rec.method = method;
                rec.label = decay_name(decay);
                rec.step = -1;
                rec.t = static_cast<double>(r);
                rec.rank = r;
                try {
                    const ToyApprox ap = toy_approx(method, A, full, r, cfg.integ.eps_os);
                    const Matrix E = A - ap.A_hat;
                    rec.err_rel_l2 = linalg::spectral_norm(E) / normA;
                    rec.err_frob_norm = E.norm() / static_cast<double>(n * n);
                    rec.eta_bar_p = ap.eta_p;
                    rec.eta_bar_s = ap.eta_s;
                    rec.m_r = ap.m_r;
                    rec.m_c = ap.m_c;
                    rec.entries_accessed = ap.entries;
                    rec.diverged = !std::isfinite(rec.err_rel_l2);
                } catch (const DegeneracyError&) {
                    rec.err_rel_l2 = kInf;
                    rec.err_frob_norm = kInf;
                    rec.eta_bar_p = kInf;
                    rec.eta_bar_s = kInf;
                    rec.diverged = true;
                }
                res.metrics.push_back(std::move(rec));
            }
        }
    }
    res.mean_err_cur = kNaN;
    res.mean_err_ref = kNaN;
    res.mean_rank = kNaN;
    return res;
}

// ---------------------------------------------------------------- time runs

namespace {

struct Checkpoint {
    double t = 0.0;
    std::optional<LowRankState> cur, ref;
    bool fom_seen = false;
    Vector fom_sv;
    Vector fom_mean;
    double fom_cyl_mean = kNaN, fom_cyl_std = kNaN;
    double cur_l2 = kNaN, cur_f = kNaN, ref_l2 = kNaN, ref_f = kNaN;
};

Vector column_mean(const LowRankState& X) {
    const Vector ybar = X.Y.colwise().mean().transpose();
    return X.U * (X.sigma.asDiagonal() * ybar);
}

// Mean and standard deviation over samples of the per-sample average
// over `rows`.
std::pair<double, double> row_group_stats(const Matrix& block) {
    const Vector per_sample = block.colwise().mean().transpose();
    const double mean = per_sample.mean();
    const double var = per_sample.size() > 1
                           ? (per_sample.array() - mean).square().sum() / static_cast<double>(per_sample.size() - 1)
                           : 0.0;
    return {mean, std::sqrt(var)};
}

struct TimeRunSetup {
    const models::StencilOracle* model = nullptr;
    Matrix A0;
    Matrix coords;              // n x 2 node coordinates
    std::vector<Index> cylinder; // rows averaged for cylinder.csv (heat)
    bool svd_ref = false;
    bool fom_ref = true;
};

RunResult time_run(const ExperimentConfig& cfg, const TimeRunSetup& setup) {
    RunResult res;
    const auto& model = *setup.model;
    const Index n = model.rows();
    const Index ns = model.cols();
    const bool tdb = cfg.method == "cur_cr_os" || cfg.method == "cur_cr" || cfg.method == "cur_cr_deim";
    const bool svd_ref = setup.svd_ref || cfg.method == "svd";
    const bool fom_ref = setup.fom_ref || cfg.method == "fom";
    const bool heat = !setup.cylinder.empty();

    integrator::IntegratorConfig ic = cfg.integ;
    if (cfg.method != "cur_cr_os") {
        ic.adaptive_oversampling = false;
        ic.m_r0 = ic.m_c0 = 0;
    }
    const long nsteps = ic.steps();
    const Index r0 = std::clamp<Index>(ic.r0, 1, std::min(n, ns));

    std::map<long, Checkpoint> cps;
    std::vector<Index> ranks{r0};

    if (tdb) {
        LowRankState X0 = LowRankState::from_matrix(setup.A0, r0);
        cps[0].cur = X0;
        try {
            integrator::integrate_tdb(model, std::move(X0), ic,
                                      [&](const LowRankState& X, const integrator::StepDiagnostics& d) {
                                          ranks.push_back(X.rank());
                                          res.diagnostics.push_back(d);
                                          if (is_checkpoint(d.step, nsteps, ic.checkpoint_every)) {
                                              Checkpoint& c = cps[d.step];
                                              c.t = d.t;
                                              c.cur = X;
                                          }
                                      });
        } catch (const BlowUpError& e) {
            res.diverged = true;
            res.diverged_step = e.step();
            res.divergence = e.what();
        }
    }

    if (svd_ref) {
        auto schedule = [&](long k) {
            if (!tdb) return r0;
            return ranks[static_cast<std::size_t>(std::min<long>(k, static_cast<long>(ranks.size()) - 1))];
        };
        try {
            integrator::svd_step_reference(model, setup.A0, ic, schedule,
                                           [&](long k, double t, const LowRankState& X) {
                                               Checkpoint& c = cps[k];
                                               c.t = t;
                                               c.ref = X;
                                           });
        } catch (const BlowUpError& e) {
            if (!res.diverged) {
                res.diverged = true;
                res.diverged_step = e.step();
                res.divergence = std::string("svd reference: ") + e.what();
            }
        }
    }

    if (fom_ref) {
        try {
            integrator::fom_integrate(model, setup.A0, ic, [&](long k, double t, const Matrix& A) {
                Checkpoint& c = cps[k];
                c.t = t;
                c.fom_seen = true;
                const Vector sv = linalg::singular_values(A);
                c.fom_sv = sv.head(std::min<Index>(cfg.sv_count, sv.size()));
                c.fom_mean = A.rowwise().mean();
                const double normA = sv(0) > 0.0 ? sv(0) : 1.0;
                const double scale = static_cast<double>(n) * static_cast<double>(ns);
                if (c.cur) {
                    const Matrix E = c.cur->materialize() - A;
                    c.cur_l2 = linalg::spectral_norm(E) / normA;
                    c.cur_f = E.norm() / scale;
                }
                if (c.ref) {
                    const Matrix E = c.ref->materialize() - A;
                    c.ref_l2 = linalg::spectral_norm(E) / normA;
                    c.ref_f = E.norm() / scale;
                }
                if (heat) {
                    auto [m, sd] = row_group_stats(A(setup.cylinder, Eigen::all));
                    c.fom_cyl_mean = m;
                    c.fom_cyl_std = sd;
                }
            });
        } catch (const BlowUpError& e) {
            if (!res.diverged) {
                res.diverged = true;
                res.diverged_step = e.step();
                res.divergence = std::string("full-order model: ") + e.what();
            }
        }
    }

    res.singular_values.header = {"step", "t", "method", "k", "sigma"};
    res.cylinder.header = {"step", "t", "source", "mean", "std"};
    const std::string cur_name = cfg.method;
    double sum_cur = 0.0, sum_ref = 0.0;
    long cnt_cur = 0, cnt_ref = 0;

    auto sv_rows = [&](long k, double t, const std::string& who, const Vector& sv) {
        for (Index i = 0; i < std::min<Index>(cfg.sv_count, sv.size()); ++i)
            res.singular_values.add({std::to_string(k), number(t), who, std::to_string(i + 1), number(sv(i))});
    };
    auto low_rank_record = [&](const std::string& who, long k, const Checkpoint& c, const LowRankState& X,
                               double l2, double f, const integrator::StepDiagnostics* d) {
        MetricRecord rec;
        rec.method = who;
        rec.step = k;
        rec.t = c.t;
        rec.rank = X.rank();
        rec.err_rel_l2 = l2;
        rec.err_frob_norm = f;
        rec.eta_bar_p = d ? d->eta_bar_p : kNaN;
        rec.eta_bar_s = d ? d->eta_bar_s : kNaN;
        rec.m_r = d ? d->m_r : 0;
        rec.m_c = d ? d->m_c : 0;
        rec.eps_proxy = d ? d->eps_proxy : kNaN;
        rec.entries_accessed = d ? d->entries_accessed : 0;
        rec.sigma_leading.assign(X.sigma.data(), X.sigma.data() + std::min<Index>(cfg.sv_count, X.rank()));
        return rec;
    };

    for (const auto& [k, c] : cps) {
        if (c.fom_seen) sv_rows(k, c.t, "fom", c.fom_sv);
        if (c.cur) {
            const integrator::StepDiagnostics* d =
                k > 0 && k <= static_cast<long>(res.diagnostics.size()) ? &res.diagnostics[static_cast<std::size_t>(k - 1)]
                                                                        : nullptr;
            res.metrics.push_back(low_rank_record(cur_name, k, c, *c.cur, c.cur_l2, c.cur_f, d));
            sv_rows(k, c.t, cur_name, c.cur->sigma);
            if (k > 0 && std::isfinite(c.cur_f)) {
                sum_cur += c.cur_f;
                ++cnt_cur;
            }
        }
        if (c.ref) {
            MetricRecord rec = low_rank_record("svd", k, c, *c.ref, c.ref_l2, c.ref_f, nullptr);
            rec.entries_accessed = k > 0 ? static_cast<long long>(n) * ns : 0;
            res.metrics.push_back(std::move(rec));
            if (cfg.method == "svd" || tdb) sv_rows(k, c.t, "svd", c.ref->sigma);
            if (k > 0 && std::isfinite(c.ref_f)) {
                sum_ref += c.ref_f;
                ++cnt_ref;
            }
        }
        if (cfg.method == "fom" && c.fom_seen) {
            MetricRecord rec;
            rec.method = "fom";
            rec.step = k;
            rec.t = c.t;
            rec.rank = std::min(n, ns);
            rec.eta_bar_p = rec.eta_bar_s = rec.eps_proxy = kNaN;
            rec.entries_accessed = k > 0 ? static_cast<long long>(n) * ns : 0;
            rec.sigma_leading.assign(c.fom_sv.data(), c.fom_sv.data() + c.fom_sv.size());
            res.metrics.push_back(std::move(rec));
        }
        if (heat) {
            const LowRankState* X = c.cur ? &*c.cur : c.ref ? &*c.ref : nullptr;
            if (X) {
                const std::string who = c.cur ? cur_name : "svd";
                auto [m, sd] = row_group_stats(X->row_block(IndexSet(setup.cylinder, n)));
                res.cylinder.add({std::to_string(k), number(c.t), who, number(m), number(sd)});
            }
            if (c.fom_seen) res.cylinder.add({std::to_string(k), number(c.t), "fom", number(c.fom_cyl_mean), number(c.fom_cyl_std)});
        }
    }

    if (res.diverged) {
        MetricRecord rec;
        rec.method = tdb ? cur_name : cfg.method;
        rec.step = res.diverged_step;
        rec.t = static_cast<double>(res.diverged_step) * ic.dt;
        rec.err_rel_l2 = rec.err_frob_norm = rec.eta_bar_p = rec.eta_bar_s = rec.eps_proxy = kNaN;
        rec.diverged = true;
        res.metrics.push_back(std::move(rec));
    }

    // Mean field at the last checkpoint that has both a reference and an
    // approximation.
    res.meanfield.header = {"node", "x", "y", "fom_mean", "approx_mean", "sampled"};
    for (auto it = cps.rbegin(); it != cps.rend(); ++it) {
        const Checkpoint& c = it->second;
        const LowRankState* X = c.cur ? &*c.cur : c.ref ? &*c.ref : nullptr;
        if (!X && !c.fom_seen) continue;
        const Vector approx = X ? column_mean(*X) : Vector::Constant(n, kNaN);
        std::vector<char> sampled(static_cast<std::size_t>(n), 0);
        if (c.cur && !res.diagnostics.empty() && it->first > 0 &&
            it->first <= static_cast<long>(res.diagnostics.size()))
            for (Index i : res.diagnostics[static_cast<std::size_t>(it->first - 1)].p) sampled[static_cast<std::size_t>(i)] = 1;
        for (Index i = 0; i < n; ++i)
            res.meanfield.add({std::to_string(i), number(setup.coords(i, 0)), number(setup.coords(i, 1)),
                               c.fom_seen ? number(c.fom_mean(i)) : "nan", number(approx(i)),
                               sampled[static_cast<std::size_t>(i)] ? "1" : "0"});
        break;
    }

    res.mean_err_cur = cnt_cur ? sum_cur / static_cast<double>(cnt_cur) : kNaN;
    res.mean_err_ref = cnt_ref ? sum_ref / static_cast<double>(cnt_ref) : kNaN;
    if (!res.diagnostics.empty()) {
        double sr = 0.0;
        for (const auto& d : res.diagnostics) {
            sr += static_cast<double>(d.rank);
            res.total_entries += d.entries_accessed;
        }
        res.mean_rank = sr / static_cast<double>(res.diagnostics.size());
    } else {
        res.mean_rank = static_cast<double>(r0);
    }
    res.dense_entries = static_cast<long long>(n) * ns *
                        static_cast<long long>(tdb ? res.diagnostics.size() : static_cast<std::size_t>(nsteps));
    return res;
}

} // namespace

RunResult run_spde(const ExperimentConfig& cfg) {
    if (cfg.experiment == Experiment::toy || cfg.experiment == Experiment::heat)
        throw ArgumentError("run_spde: not an SPDE experiment");
    models::SpdeModel model(cfg.spde);
    TimeRunSetup setup;
    setup.model = &model;
    setup.A0 = model.initial_full();
    setup.coords = Matrix::Zero(model.rows(), 2);
    setup.coords.col(0) = model.grid();
    setup.svd_ref = cfg.method != "fom";
    setup.fom_ref = true;
    return time_run(cfg, setup);
}

RunResult run_heat(const ExperimentConfig& cfg) {
    if (cfg.experiment != Experiment::heat) throw ArgumentError("run_heat: not a heat experiment");
    const HeatOptions& h = cfg.heat;
    models::HeatSystem sys = h.mass_mtx.empty()
                                 ? models::synthetic_heat_system(h.geometry)
                                 : models::load_heat_system(h.mass_mtx, h.stiffness_mtx, h.coupling_mtx, h.g_file,
                                                            h.boundary_file);
    sys.T_inf = h.T_inf;
    sys.eps_rad = h.eps_rad;
    sys.sigma_sb = h.sigma_sb;
    const Matrix corners = models::heat_corner_samples(h.s, cfg.seed, h.corner_min, h.corner_max);
    const Matrix T_B = models::heat_boundary_temperatures(sys.boundary_xy, corners);
    Matrix T0;
    if (h.initial == "bilinear") {
        if (sys.interior_xy.rows() != sys.interior_size())
            throw ArgumentError("run_heat: initial = bilinear needs interior coordinates; use initial = ambient");
        T0 = models::heat_bilinear_field(sys.boundary_xy, sys.interior_xy, corners);
    }
    models::HeatModel model(sys, T_B, std::move(T0));

    TimeRunSetup setup;
    setup.model = &model;
    setup.A0 = model.initial_full();
    setup.coords = model.system().interior_xy.rows() == model.rows() ? model.system().interior_xy
                                                                     : Matrix::Constant(model.rows(), 2, kNaN);
    for (Index i = 0; i < model.rows(); ++i)
        if (model.system().g(i) != 0.0) setup.cylinder.push_back(i);
    if (setup.cylinder.empty()) throw ArgumentError("run_heat: the system has no radiating nodes");
    setup.svd_ref = cfg.method == "svd";
    setup.fom_ref = h.reference;
    return time_run(cfg, setup);
}

RunResult run(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
    case Experiment::toy: return run_toy(cfg);
    case Experiment::heat: return run_heat(cfg);
    default: return run_spde(cfg);
    }
}

void write_outputs(const ExperimentConfig& cfg, const RunResult& result, double wall_seconds) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
    const fs::path dir(cfg.output_dir);

    emit::emit(result.metrics, "csv", (dir / "metrics.csv").string());
    emit::emit(result.metrics, "jsonl", (dir / "metrics.jsonl").string());
    emit::write_table(result.singular_values, (dir / "singular_values.csv").string());
    if (!result.meanfield.header.empty()) emit::write_table(result.meanfield, (dir / "meanfield.csv").string());
    if (cfg.experiment == Experiment::heat) emit::write_table(result.cylinder, (dir / "cylinder.csv").string());

    {
        const std::string path = (dir / "diagnostics.jsonl").string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + path + "'");
        for (const auto& d : result.diagnostics) {
            nlohmann::ordered_json j;
            j["step"] = d.step;
            j["t"] = d.t;
            j["rank"] = d.rank;
            j["sampled_rank"] = d.sampled_rank;
            j["m_r"] = d.m_r;
            j["m_c"] = d.m_c;
            j["eps"] = d.eps_proxy;
            j["eta_bar_p"] = d.eta_bar_p;
            j["eta_bar_s"] = d.eta_bar_s;
            j["oversampling_bound_hit"] = d.oversampling_bound_hit;
            j["entries_accessed"] = d.entries_accessed;
            j["wall_time"] = d.wall_time;
            out << j.dump() << '\n';
        }
        if (!out) throw IoError("write failed for '" + path + "'");
    }

    nlohmann::ordered_json m;
    m["experiment"] = to_string(cfg.experiment);
    m["method"] = cfg.method;
    m["seed"] = cfg.seed;
    m["version"] = version();
    m["config"] = cfg.resolved.entries();
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };
    m["summary"] = {{"mean_err_frob_norm", num(result.mean_err_cur)},
                    {"mean_err_frob_norm_svd", num(result.mean_err_ref)},
                    {"mean_rank", num(result.mean_rank)},
                    {"entries_accessed", result.total_entries},
                    {"dense_entries", result.dense_entries},
                    {"diverged", result.diverged},
                    {"diverged_step", result.diverged_step},
                    {"divergence", result.divergence}};
    m["wall_time"] = wall_seconds;
    const std::string path = (dir / "run_manifest.json").string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << m.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace curos::harness
