#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

#include "curos/errors.hpp"
#include "curos/harness.hpp"

using namespace curos;
using namespace curos::harness;
namespace fs = std::filesystem;

namespace {

KeyValues kv(std::initializer_list<std::pair<const char*, const char*>> items) {
    KeyValues k;
    for (const auto& [key, value] : items) k.set(key, value);
    return k;
}

} // namespace

TEST_CASE("config resolution defaults and errors") {
    const ExperimentConfig b = resolve_config(Experiment::burgers, kv({{"eps_u", "1e-6"}}));
    CHECK(b.integ.eps_u == 1e-6);
    CHECK(b.integ.eps_l == doctest::Approx(1e-10));
    CHECK(b.integ.r0 == b.spde.d + 1);
    CHECK(b.resolved.get_string("eps_l", "") != "");

    const ExperimentConfig t = resolve_config(Experiment::toy, kv({{"n", "30"}}));
    CHECK(t.toy.max_rank == 29);

    const ExperimentConfig h = resolve_config(Experiment::heat, {});
    CHECK(h.integ.dt == doctest::Approx(78500.0 / 8000.0));
    CHECK(h.integ.t_final == doctest::Approx(78500.0));

    CHECK_THROWS_AS(resolve_config(Experiment::toy, kv({{"nu", "1"}})), ArgumentError);
    CHECK_THROWS_AS(resolve_config(Experiment::toy, kv({{"method", "fom"}})), ArgumentError);
    CHECK_THROWS_AS(resolve_config(Experiment::kdv, kv({{"method", "cur_opt"}})), ArgumentError);
    CHECK_THROWS_AS(resolve_config(Experiment::heat, kv({{"mass_mtx", "m.mtx"}})), ArgumentError);
    CHECK(parse_experiment("allen-cahn") == Experiment::allen_cahn);
    CHECK_THROWS_AS(parse_experiment("navier"), ArgumentError);
}

TEST_CASE("toy sweep: the svd row is the exact truncation error") {
    const ExperimentConfig cfg = resolve_config(Experiment::toy, kv({{"n", "20"}, {"method", "all"}}));
    const RunResult res = run_toy(cfg);
    // Five methods, two decays, ranks 1..19.
    CHECK(res.metrics.size() == 5 * 2 * 19);
    const Vector d = models::toy_decay(20, models::Decay::slow);
    for (const auto& m : res.metrics) {
        if (m.method != "svd" || m.label != "slow") continue;
        CHECK(m.err_rel_l2 == doctest::Approx(d(m.rank) / d(0)).epsilon(1e-8));
    }
    for (const auto& m : res.metrics)
        if (m.method == "cur_cr_os") CHECK(std::max(m.eta_bar_p, m.eta_bar_s) <= 10.0);
}

TEST_CASE("small Burgers run writes every output") {
    const fs::path dir = fs::temp_directory_path() / ("curos_harness_" + std::to_string(::getpid()));
    const ExperimentConfig cfg = resolve_config(
        Experiment::burgers,
        kv({{"n", "21"}, {"s", "8"}, {"t_final", "0.05"}, {"checkpoint_every", "10"}, {"output_dir", dir.c_str()}}));
    const RunResult res = run(cfg);
    CHECK_FALSE(res.diverged);
    CHECK(res.diagnostics.size() == 50);
    CHECK(res.dense_entries == 21LL * 8 * 50);
    CHECK(res.total_entries > 0);
    CHECK(std::isfinite(res.mean_err_cur));
    bool fom_zero = true;
    for (const auto& m : res.metrics)
        if (m.method == "fom" && m.err_frob_norm != 0.0) fom_zero = false;
    CHECK(fom_zero);

    write_outputs(cfg, res, 0.5);
    for (const char* f : {"metrics.csv", "metrics.jsonl", "singular_values.csv", "meanfield.csv",
                          "diagnostics.jsonl", "run_manifest.json"})
        CHECK(fs::exists(dir / f));
    CHECK_FALSE(fs::exists(dir / "cylinder.csv"));
    std::ifstream in(dir / "run_manifest.json");
    const auto manifest = nlohmann::json::parse(in);
    CHECK(manifest["experiment"] == "burgers");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["config"]["n"] == "21");
    CHECK(emit::read_metrics_csv((dir / "metrics.csv").string()).size() == res.metrics.size());
    fs::remove_all(dir);
}
