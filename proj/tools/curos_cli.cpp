#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "curos/config.hpp"
#include "curos/emit.hpp"
#include "curos/errors.hpp"
#include "curos/harness.hpp"
#include "curos/verify.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<long long> rank;
    std::optional<double> eps_os, eps_u, eps_l;
    std::optional<std::string> method, out;
    std::vector<std::string> sets;
};

void add_run_flags(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--rank", o.rank, "initial rank (toy: largest rank in the sweep)");
    sub->add_option("--eps-os", o.eps_os, "oversampling threshold on eta-bar");
    sub->add_option("--eps-u", o.eps_u, "rank-increase threshold");
    sub->add_option("--eps-l", o.eps_l, "rank-decrease threshold");
    sub->add_option("--method", o.method, "approximation method");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--set", o.sets, "extra key=value override, repeatable");
}

curos::KeyValues collect(const Overrides& o, curos::harness::Experiment e) {
    using curos::emit::number;
    curos::KeyValues kv = o.config.empty() ? curos::KeyValues{} : curos::KeyValues::load(o.config);
    curos::KeyValues cli;
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw curos::ArgumentError("--set expects key=value, got '" + s + "'");
        cli.merge(curos::KeyValues::parse(s, "--set"));
    }
    if (o.seed) cli.set("seed", std::to_string(*o.seed));
    if (o.rank) cli.set(e == curos::harness::Experiment::toy ? "max_rank" : "rank", std::to_string(*o.rank));
    if (o.eps_os) cli.set("eps_os", number(*o.eps_os));
    if (o.eps_u) cli.set("eps_u", number(*o.eps_u));
    if (o.eps_l) cli.set("eps_l", number(*o.eps_l));
    if (o.method) cli.set("method", *o.method);
    if (o.out) cli.set("output_dir", *o.out);
    kv.merge(cli);
    return kv;
}

int run_experiment(curos::harness::Experiment e, const Overrides& o) {
    namespace h = curos::harness;
    const h::ExperimentConfig cfg = h::resolve_config(e, collect(o, e));
    const auto t0 = std::chrono::steady_clock::now();
    const h::RunResult res = h::run(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    h::write_outputs(cfg, res, wall);

    std::printf("%s %s: %zu records -> %s (%.2f s)\n", h::to_string(e).c_str(), cfg.method.c_str(),
                res.metrics.size(), cfg.output_dir.c_str(), wall);
    if (e != h::Experiment::toy) {
        std::printf("  mean err (frob/ns): %.3e  svd reference: %.3e  mean rank: %.2f\n", res.mean_err_cur,
                    res.mean_err_ref, res.mean_rank);
        if (res.total_entries > 0)
            std::printf("  entries accessed: %lld of %lld dense\n", res.total_entries, res.dense_entries);
    }
    if (res.diverged) {
        std::fprintf(stderr, "diverged at step %ld: %s\n", res.diverged_step, res.divergence.c_str());
        return 3;
    }
    return 0;
}

int run_verify(std::uint64_t seed) {
    int failed = 0;
    for (const auto& c : curos::verify::run_checks(seed)) {
        std::printf("%-28s %s  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.detail.c_str());
        failed += c.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CUR low-rank approximation and TDB-CUR time integration experiments"};
    app.set_version_flag("--version", curos::harness::version());
    app.require_subcommand(1);

    Overrides o;
    std::uint64_t verify_seed = 1;
    const std::pair<const char*, const char*> experiments[] = {
        {"toy", "toy matrix rank sweep"},
        {"burgers", "stochastic Burgers equation"},
        {"allen-cahn", "stochastic Allen-Cahn equation"},
        {"kdv", "stochastic Korteweg-de Vries equation"},
        {"heat", "nonlinear heat conduction with radiation"}};
    for (const auto& [name, help] : experiments) add_run_flags(app.add_subcommand(name, help), o);
    app.add_subcommand("verify", "run the built-in property checks")->add_option("--seed", verify_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (sub->get_name() == "verify") return run_verify(verify_seed);
        return run_experiment(curos::harness::parse_experiment(sub->get_name()), o);
    } catch (const curos::ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
