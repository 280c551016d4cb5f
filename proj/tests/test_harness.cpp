#include "doctest.h"

#include <sstream>

#include "rics/harness.hpp"

using namespace rics;

namespace {

ScenarioConfig small_cfg() {
    ScenarioConfig cfg;
    cfg.num_cvs = 3;
    cfg.num_v2v_pairs = 3;
    cfg.num_elements = 6;
    return cfg;
}

int line_count(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("unknown scheme rejected") {
    CHECK_THROWS_AS(run_scheme("definitely_not_a_scheme", small_cfg(), 1),
                    UnknownScheme);
}

TEST_CASE("run_scheme rows are a pure function of (config, scheme, seed)") {
    const auto cfg = small_cfg();
    const RunResult a = run_scheme("aioa", cfg, 5);
    const RunResult b = run_scheme("aioa", cfg, 5);
    CHECK(a.sum_safety == b.sum_safety);
    CHECK(a.sum_v2v_rate_bps == b.sum_v2v_rate_bps);
    CHECK(a.outer_iters == b.outer_iters);
}

TEST_CASE("scheme construction constraints") {
    const auto cfg = small_cfg();

    const DetailedRun total = run_scheme_detailed("total_offload", cfg, 2);
    for (double r : total.trace.rho.rho) CHECK(r == 1.0);

    const DetailedRun local = run_scheme_detailed("total_local", cfg, 2);
    for (double r : local.trace.rho.rho) CHECK(r == 0.0);

    const DetailedRun binary = run_scheme_detailed("rand_binary_offload", cfg, 2);
    for (double r : binary.trace.rho.rho) CHECK((r == 0.0 || r == 1.0));

    const DetailedRun rand_off = run_scheme_detailed("rand_offload", cfg, 2);
    for (double r : rand_off.trace.rho.rho) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }

    // star and fixed_psi differ only in the psi vector
    const DetailedRun star = run_scheme_detailed("star_ris", cfg, 2);
    for (double p : star.trace.profile.psi) CHECK(p == 1.0);
    const DetailedRun fixed = run_scheme_detailed("fixed_psi", cfg, 2);
    for (double p : fixed.trace.profile.psi) CHECK(p == 1.2);

    const DetailedRun rand_psi = run_scheme_detailed("rand_psi", cfg, 2);
    for (double p : rand_psi.trace.profile.psi) {
        CHECK(p >= 1.0);
        CHECK(p <= 2.0);
    }

    // every scheme's emitted profile satisfies the hardware invariants
    for (const auto& scheme : known_schemes()) {
        const DetailedRun run = run_scheme_detailed(scheme, cfg, 3);
        CHECK(run.trace.profile.violations(0.5, 2.0).empty());
        CHECK(run.trace.alpha.violations().empty());
    }
}

TEST_CASE("ris_only equals no_ris in V2V sum rate per seed") {
    const auto cfg = small_cfg();
    for (std::uint64_t seed : {1, 2, 3}) {
        const RunResult a = run_scheme("ris_only", cfg, seed);
        const RunResult b = run_scheme("no_ris", cfg, seed);
        CHECK(a.sum_v2v_rate_bps == doctest::Approx(b.sum_v2v_rate_bps).epsilon(1e-12));
    }
}

TEST_CASE("sweep grid shape and header-only output") {
    const auto cfg = small_cfg();
    const auto rows = sweep("cv_power", 26.0, 30.0, 4.0, {"aioa", "no_ris"},
                            {1, 2, 3}, cfg);
    CHECK(rows.size() == 2 * 2 * 3);  // 2 values x 2 schemes x 3 seeds
    const std::string csv = results_to_csv(rows);
    CHECK(line_count(csv) == 13);  // header + 12 rows

    const auto empty = sweep("cv_power", 26.0, 30.0, 4.0, {"aioa"}, {}, cfg);
    CHECK(empty.empty());
    CHECK(line_count(results_to_csv(empty)) == 1);  // header only
}

TEST_CASE("sweep parameter application") {
    const auto cfg = small_cfg();
    CHECK(apply_sweep_param(cfg, "cv_power", 33.0).cv_power == 33.0);
    CHECK(apply_sweep_param(cfg, "v2v_power", 17.0).v2v_power == 17.0);
    CHECK(apply_sweep_param(cfg, "task_bits", 2e6).task_bits == 2e6);
    CHECK(apply_sweep_param(cfg, "num_cvs", 7.0).num_cvs == 7);
    CHECK(apply_sweep_param(cfg, "num_elements", 12.0).num_elements == 12);
    const auto moved = apply_sweep_param(cfg, "d_rics", 120.0);
    CHECK(moved.rics_bs_distance() == doctest::Approx(120.0));
    CHECK_THROWS_AS(apply_sweep_param(cfg, "bogus", 1.0), DomainError);
}

TEST_CASE("csv column layout") {
    RunResult r;
    r.seed = 4;
    r.scheme = "aioa";
    r.m_cnt = 10;
    r.n_cnt = 10;
    r.l_cnt = 30;
    r.pm_dbm = 28;
    r.pt_dbm = 23;
    r.d_rics_m = 80;
    r.s_m_bits = 15e6;
    r.sum_safety = 1.5;
    r.mean_safety = 0.15;
    r.sum_v2v_rate_bps = 2e8;
    r.outer_iters = 3;
    r.converged = true;
    r.wall_ms = 12.5;
    const std::string csv = results_to_csv({r});
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header ==
          "seed,scheme,M,N,L,pm_dbm,pt_dbm,d_rics_m,s_m_bits,sum_safety,"
          "mean_safety,sum_v2v_rate_bps,outer_iters,converged,wall_ms");
    CHECK(row.substr(0, 7) == "4,aioa,");
    CHECK(row.find(",1,") != std::string::npos);  // converged flag
}

TEST_CASE("per-CV report and trace CSV") {
    auto cfg = small_cfg();
    cfg.max_delay = 0.25;
    const DetailedRun run = run_scheme_detailed("aioa", cfg, 6);
    const std::string report = report_to_csv(run.report, cfg);
    CHECK(report.find("max_delay_s") != std::string::npos);
    CHECK(line_count(report) == 1 + cfg.num_cvs);
    const std::string trace = trace_to_csv(run.trace);
    CHECK(line_count(trace) == 1 + static_cast<int>(run.trace.iterations.size()));
}

TEST_CASE("validation suites pass" * doctest::timeout(600)) {
    ScenarioConfig cfg;
    const auto grad = validate("gradcheck", cfg);
    CHECK(grad.passed);
    const auto grid = validate("phase-grid", cfg);
    CHECK(grid.passed);
    CHECK_THROWS_AS(validate("no-such-suite", cfg), DomainError);
}
