#pragma once

// Experiment drivers behind the command-line tool: toy rank sweeps, SPDE
// time integration against full-order and SVD references, and the heat
// study. Every driver is deterministic given its configuration.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "curos/config.hpp"
#include "curos/emit.hpp"
#include "curos/integrator.hpp"
#include "curos/models.hpp"

namespace curos::harness {

enum class Experiment { toy, burgers, allen_cahn, kdv, heat };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct ToyOptions {
    Index n = 100;
    std::vector<models::Decay> decays{models::Decay::fast, models::Decay::slow};
    Index max_rank = 0; // 0: n - 1
};

struct HeatOptions {
    models::SyntheticHeatSpec geometry;
    Index s = 32;
    double corner_min = 273.0;
    double corner_max = 373.0;
    double T_inf = 273.0;
    double eps_rad = 0.2;
    double sigma_sb = 5.67e-8;
    // Matrix Market / text inputs; all empty selects the synthetic system.
    std::string mass_mtx, stiffness_mtx, coupling_mtx, g_file, boundary_file;
    bool reference = true; // integrate the dense system alongside
    // "bilinear": interior starts at the corner interpolant of its sample;
    // "ambient": interior starts at T_inf.
    std::string initial = "bilinear";
};

struct ExperimentConfig {
    Experiment experiment = Experiment::toy;
    std::string method = "cur_cr_os";
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    Index sv_count = 10; // singular values recorded per checkpoint

    ToyOptions toy;
    models::SpdeSpec spde;
    HeatOptions heat;
    integrator::IntegratorConfig integ;

    KeyValues resolved; // every key with its effective value
};

// Keys accepted for an experiment.
std::set<std::string> known_keys(Experiment e);

// Applies experiment defaults, then `kv`. Throws ArgumentError on unknown
// keys, bad values, or a method that the experiment does not support.
ExperimentConfig resolve_config(Experiment e, const KeyValues& kv);

struct RunResult {
    std::vector<emit::MetricRecord> metrics;
    emit::Table singular_values;
    emit::Table meanfield;
    emit::Table cylinder;
    std::vector<integrator::StepDiagnostics> diagnostics;

    // Time averages over checkpoints after t = 0 (NaN when not applicable).
    double mean_err_cur = 0.0;
    double mean_err_ref = 0.0;
    double mean_rank = 0.0;          // over all steps
    long long total_entries = 0;     // F entries read by the CUR run
    long long dense_entries = 0;     // n s steps
    bool diverged = false;
    long diverged_step = -1;
    std::string divergence;
};

RunResult run_toy(const ExperimentConfig& cfg);
RunResult run_spde(const ExperimentConfig& cfg);
RunResult run_heat(const ExperimentConfig& cfg);
RunResult run(const ExperimentConfig& cfg);

// Writes metrics.csv, metrics.jsonl, singular_values.csv, meanfield.csv,
// cylinder.csv (heat), diagnostics.jsonl and run_manifest.json into
// cfg.output_dir, creating it if needed. Only diagnostics.jsonl and the
// manifest carry wall-clock times.
void write_outputs(const ExperimentConfig& cfg, const RunResult& result, double wall_seconds);

std::string version();

} // namespace curos::harness
