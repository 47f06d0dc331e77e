#pragma once

// Time integration of dA/dt = F(A) on the rank-r manifold with CUR-CR-OS
// step truncation, plus the full-order and SVD step-truncation references.

#include <functional>
#include <limits>
#include <vector>

#include "curos/cur.hpp"
#include "curos/index_set.hpp"
#include "curos/linalg.hpp"
#include "curos/low_rank.hpp"

namespace curos::integrator {

// Entry access to F(A_hat) for a low-rank A_hat. Implementations read A_hat
// only through its factors and never form the n x s matrix. The three access
// patterns must agree on overlapping entries.
class RhsOracle {
public:
    virtual ~RhsOracle() = default;

    virtual Index rows() const = 0;
    virtual Index cols() const = 0;

    // F(A_hat)(:, s)
    virtual Matrix eval_cols(const LowRankState& state, double t, const IndexSet& s) const = 0;
    // F(A_hat)(p, :)
    virtual Matrix eval_rows(const LowRankState& state, double t, const IndexSet& p) const = 0;
    // F(A_hat)(p, s)
    virtual Matrix eval_cross(const LowRankState& state, double t, const IndexSet& p,
                              const IndexSet& s) const = 0;
};

// Dense evaluation of F, used by the full-order and SVD references.
class FullRhs {
public:
    virtual ~FullRhs() = default;
    virtual Matrix eval_full(const Matrix& A, double t) const = 0;
};

enum class Scheme { euler, rk4 };

struct IntegratorConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    double eps_os = 10.0;
    double eps_u = 1e-8;  // rank increase when the proxy exceeds this
    double eps_l = 1e-12; // rank decrease when the proxy falls below this
    Index r0 = 1;
    Scheme scheme = Scheme::rk4;
    double rank_probe_fraction = 0.01;
    Index max_rank_jump = 1;
    Index max_rank = 0; // 0: limited only by min(n, s)
    bool adaptive_oversampling = true;
    Index m_r0 = 0;
    Index m_c0 = 0;
    long checkpoint_every = 10;

    long steps() const;
    void validate() const;

    // Fixed-rank run: thresholds that never trigger.
    void freeze_rank() {
        eps_u = std::numeric_limits<double>::infinity();
        eps_l = 0.0;
    }
};

struct TdbCarry {
    Index target_rank = 1; // rank to sample at in the next step
    cur::OversampleIndicators indicators;
};

struct StepDiagnostics {
    long step = 0;
    double t = 0.0;          // time at the end of the step
    Index sampled_rank = 0;  // r used for sampling in this step
    Index rank = 0;          // rank of the returned state
    Index next_rank = 0;     // rank to sample at next
    Index m_r = 0;
    Index m_c = 0;
    Index mbar_r = 0;
    Index mbar_c = 0;
    double eps_proxy = 0.0;
    double eta_bar_p = 1.0;
    double eta_bar_s = 1.0;
    bool oversampling_bound_hit = false;
    long long entries_accessed = 0; // distinct F entries, summed over stages
    double wall_time = 0.0;         // seconds
    IndexSet p;                     // base row samples
    IndexSet s;                     // base column samples
    IndexSet p_bar, s_bar;          // oversampled sets of the final compression
    IndexSet p_probe, s_probe;      // rank-probe sets
};

struct StepResult {
    LowRankState state;
    TdbCarry carry;
    StepDiagnostics diag;
};

struct ProbeSets {
    IndexSet p;
    IndexSet s;
    Index mbar_r = 0;
    Index mbar_c = 0;
    bool clamped = false; // r + mbar exceeded the ambient dimension
};

// Oversampled probe sets of sizes r + mbar with mbar = max(1, round(fraction * dim)),
// selected greedily on U and Y. When base sets are given the probe sets are
// nested on them.
ProbeSets rank_probe_indices(const Matrix& U, const Matrix& Y, Index r, double fraction,
                             const IndexSet* p_base = nullptr, const IndexSet* s_base = nullptr);

// One TDB-CUR (CR-OS) step from t to t + dt.
StepResult tdb_step(const LowRankState& state, const RhsOracle& oracle, double t, const IntegratorConfig& cfg,
                    const TdbCarry& carry, long step_index = 0);

// Distinct F entries of one explicit Euler step, in closed form:
// entry_count(n, s, r, m_r, m_c) + mbar_r mbar_c minus the probe entries that
// fall inside the oversampled cross block.
long long euler_entry_budget(Index n, Index s, const StepDiagnostics& d);

using StepObserver = std::function<void(const LowRankState&, const StepDiagnostics&)>;

struct TdbRun {
    LowRankState final_state;
    std::vector<StepDiagnostics> diagnostics;
};

TdbRun integrate_tdb(const RhsOracle& oracle, LowRankState initial, const IntegratorConfig& cfg,
                     const StepObserver& observer = {});

struct Trajectory {
    std::vector<long> step;
    std::vector<double> t;
    std::vector<Matrix> states;
};

struct LowRankTrajectory {
    std::vector<long> step;
    std::vector<double> t;
    std::vector<LowRankState> states;
};

using FullObserver = std::function<void(long step, double t, const Matrix& A)>;
using LowRankObserver = std::function<void(long step, double t, const LowRankState& X)>;

// Full-order integration; snapshots every cfg.checkpoint_every steps plus
// the initial and final states. Throws BlowUpError on non-finite values.
Trajectory fom_integrate(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg);

// Same integration, streaming the checkpoints instead of storing them.
void fom_integrate(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg,
                   const FullObserver& observer);

// Step truncation with a dense SVD: A_k = SVD_{r_k}(step(A_{k-1})). The rank
// schedule maps a step index (0 for the initial state) to r_k.
LowRankTrajectory svd_step_reference(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg,
                                     const std::function<Index(long)>& rank_schedule);

void svd_step_reference(const FullRhs& model, const Matrix& A0, const IntegratorConfig& cfg,
                        const std::function<Index(long)>& rank_schedule, const LowRankObserver& observer);

} // namespace curos::integrator
