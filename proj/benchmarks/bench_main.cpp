#include <benchmark/benchmark.h>

#include "curos/cur.hpp"
#include "curos/integrator.hpp"
#include "curos/models.hpp"
#include "curos/sampling.hpp"

using namespace curos;

static void BM_Qdeim(benchmark::State& state) {
    const Index n = state.range(0), r = state.range(1);
    const Matrix U = linalg::svd_truncated(models::toy_matrix({n, models::Decay::slow, 1}), r).U;
    for (auto _ : state) benchmark::DoNotOptimize(sampling::qdeim(U));
}
BENCHMARK(BM_Qdeim)->Args({100, 10})->Args({400, 20});

static void BM_GreedyOversample(benchmark::State& state) {
    const Index n = state.range(0), r = state.range(1);
    const Matrix U = linalg::svd_truncated(models::toy_matrix({n, models::Decay::slow, 1}), r).U;
    const IndexSet seed = sampling::qdeim(U);
    for (auto _ : state) {
        sampling::GreedyOversampler g(U, seed);
        benchmark::DoNotOptimize(g.first(2 * r));
    }
}
BENCHMARK(BM_GreedyOversample)->Args({100, 10})->Args({400, 20});

static void BM_CurCrOs(benchmark::State& state) {
    const Index n = state.range(0), r = state.range(1);
    const Matrix A = models::toy_matrix({n, models::Decay::slow, 1});
    const auto svd = linalg::svd_truncated(A, r);
    const IndexSet p = sampling::qdeim(svd.U), s = sampling::qdeim(svd.V);
    const Matrix C = linalg::select_cols(A, s), R = linalg::select_rows(A, p);
    const cur::CrossSupplier cross = [&](const IndexSet& a, const IndexSet& b) { return linalg::select(A, a, b); };
    for (auto _ : state) benchmark::DoNotOptimize(cur::cur_cr_os(C, R, p, s, cross));
}
BENCHMARK(BM_CurCrOs)->Args({100, 10})->Args({100, 40});

static void BM_TdbStepBurgers(benchmark::State& state) {
    const models::SpdeModel model(models::SpdeSpec::desk(models::SpdeKind::burgers));
    integrator::IntegratorConfig cfg;
    cfg.dt = model.spec().dt;
    cfg.scheme = state.range(0) == 0 ? integrator::Scheme::euler : integrator::Scheme::rk4;
    const LowRankState x = model.initial_state(model.spec().d + 1);
    integrator::TdbCarry carry;
    carry.target_rank = x.rank();
    for (auto _ : state) benchmark::DoNotOptimize(integrator::tdb_step(x, model, 0.0, cfg, carry));
}
BENCHMARK(BM_TdbStepBurgers)->Arg(0)->Arg(1);

static void BM_FullRhsBurgers(benchmark::State& state) {
    const models::SpdeModel model(models::SpdeSpec::desk(models::SpdeKind::burgers));
    const Matrix A = model.initial_full();
    for (auto _ : state) benchmark::DoNotOptimize(model.eval_full(A, 0.0));
}
BENCHMARK(BM_FullRhsBurgers);

BENCHMARK_MAIN();
