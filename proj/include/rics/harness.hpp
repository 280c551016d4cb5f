#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rics/aioa.hpp"
#include "rics/config.hpp"

namespace rics {

/// One result row of the experiment CSV.
struct RunResult {
    std::uint64_t seed = 0;
    std::string scheme;
    int m_cnt = 0;
    int n_cnt = 0;
    int l_cnt = 0;
    double pm_dbm = 0.0;
    double pt_dbm = 0.0;
    double d_rics_m = 0.0;
    double s_m_bits = 0.0;
    double sum_safety = 0.0;
    double mean_safety = 0.0;
    double sum_v2v_rate_bps = 0.0;
    int outer_iters = 0;
    bool converged = false;
    double wall_ms = 0.0;
};

const std::vector<std::string>& known_schemes();

/// Runs one scheme on one (config, seed) cell. All schemes share the same
/// scenario and channel draws per seed; scheme-specific randomness comes from
/// a separate substream. Throws UnknownScheme for unrecognized ids.
RunResult run_scheme(const std::string& scheme, const ScenarioConfig& cfg,
                     std::uint64_t seed);

/// run_scheme plus the full trace and per-CV report, for the CLI.
struct DetailedRun {
    RunResult row;
    SolverTrace trace;
    SafetyReport report;
};
DetailedRun run_scheme_detailed(const std::string& scheme,
                                const ScenarioConfig& cfg, std::uint64_t seed);

/// Sweepable config parameters.
///   cv_power, v2v_power (dBm); d_rics (m, moves rics_position along +x from
///   the BS); task_bits; num_cvs; num_elements.
ScenarioConfig apply_sweep_param(const ScenarioConfig& base,
                                 const std::string& param, double value);

/// Cross product of (param values) x schemes x seeds, executed on a work
/// pool (RICS_SIM_THREADS caps it) and returned sorted by (param, scheme,
/// seed).
std::vector<RunResult> sweep(const std::string& param, double from, double to,
                             double step, const std::vector<std::string>& schemes,
                             const std::vector<std::uint64_t>& seeds,
                             const ScenarioConfig& cfg);

std::string results_to_csv(const std::vector<RunResult>& rows);
std::string report_to_csv(const SafetyReport& report, const ScenarioConfig& cfg);
std::string trace_to_csv(const SolverTrace& trace);

struct ValidationReport {
    std::string suite;
    bool passed = false;
    std::vector<std::string> lines;
};

/// Oracle suites: "mc-expectation" (Monte Carlo vs the closed-form V2V
/// expectation), "gradcheck" (analytic vs central finite differences),
/// "phase-grid" (closed-form element updates vs exhaustive grid).
ValidationReport validate(const std::string& suite, const ScenarioConfig& cfg);

/// Size of the worker pool: RICS_SIM_THREADS if set, else hardware threads.
int worker_count();

}  // namespace rics
