#include "rics/aioa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rics/solver_offload.hpp"
#include "rics/solver_phase.hpp"
#include "rics/solver_spectrum.hpp"

namespace rics {

namespace {

struct BlockState {
    OffloadPlan rho;
    SpectrumAssignment alpha;
    RicsProfile profile;
};

std::vector<double> rates_for(const BlockState& st, const ChannelSet& cs,
                              const ScenarioConfig& cfg, RicsMode mode) {
    std::vector<double> rates(cs.num_cvs);
    for (int m = 0; m < cs.num_cvs; ++m)
        rates[m] = rate(sinr_v2i(m, cs, st.profile, st.alpha, cfg, mode),
                        cfg.bandwidth);
    return rates;
}

double sum_safety_of(const BlockState& st, const ChannelSet& cs,
                     const Scenario& sc, const ScenarioConfig& cfg,
                     RicsMode mode) {
    const auto rates = rates_for(st, cs, cfg, mode);
    double sum = 0.0;
    for (int m = 0; m < cs.num_cvs; ++m) {
        const double r = st.rho.rho[m];
        if (r > 0.0 && rates[m] <= 0.0) return -std::numeric_limits<double>::infinity();
        sum += safety_coefficient(r, rates[m], sc.local_cpu[m], cfg);
    }
    return sum;
}

double outage_violation_of(const BlockState& st, const ChannelSet& cs,
                           const ScenarioConfig& cfg, RicsMode mode,
                           double gamma_c) {
    double worst = 0.0;
    for (int n = 0; n < cs.num_pairs; ++n) {
        const double g = expected_v2v_sinr(n, cs, st.profile, st.alpha, cfg, mode);
        worst = std::max(worst, std::max(0.0, gamma_c - g));
    }
    return worst;
}

}  // namespace

bool check_convergence(const std::vector<double>& sum_safety_trace, double delta) {
    if (sum_safety_trace.size() < 2) return false;
    const double cur = sum_safety_trace.back();
    const double prev = sum_safety_trace[sum_safety_trace.size() - 2];
    if (cur == 0.0) return prev == 0.0;
    return (cur - prev) / cur < delta;
}

double complexity_estimate(double outer_iters, double inner_iters, double m_cnt,
                           double n_cnt, double l_cnt) {
    return outer_iters * (inner_iters * m_cnt + m_cnt * n_cnt +
                          std::pow(l_cnt + 1.0, 3.5) + std::pow(l_cnt, 3.5));
}

SolverTrace run_aioa(const Scenario& sc, const ChannelSet& cs,
                     const ScenarioConfig& cfg, const AioaOptions& opts) {
    using clock = std::chrono::steady_clock;
    const double gamma_c =
        outage_threshold(cfg.sinr_threshold, cfg.smooth_param, cfg.outage_cap);

    SolverTrace out;
    BlockState st;
    st.alpha = opts.fixed_alpha ? *opts.fixed_alpha
                                : SpectrumAssignment::zeros(cs.num_cvs, cs.num_pairs);
    st.profile = opts.fixed_profile ? *opts.fixed_profile
                                    : initial_profile(cs.num_elements, opts.seed);
    if (opts.fixed_psi) st.profile.psi = *opts.fixed_psi;

    // Initial rho: delay-balancing breakpoint (always feasible).
    st.rho.rho.assign(cs.num_cvs, 0.0);
    {
        const auto rates = rates_for(st, cs, cfg, opts.mode);
        for (int m = 0; m < cs.num_cvs; ++m)
            st.rho.rho[m] = opts.fixed_rho
                                ? (*opts.fixed_rho)[m]
                                : delay_breakpoint(rates[m], sc.local_cpu[m], cfg);
    }

    auto score = [&](const BlockState& s) {
        return std::make_pair(outage_violation_of(s, cs, cfg, opts.mode, gamma_c),
                              -sum_safety_of(s, cs, sc, cfg, opts.mode));
    };

    // A profile or assignment move only shows its worth once the offloading
    // ratios re-fit to the new rates; candidates are judged (and kept) with
    // that refit applied.
    auto refit_rho = [&](BlockState& s) {
        if (!opts.optimize_rho) return;
        const auto rates = rates_for(s, cs, cfg, opts.mode);
        const FpState fp = solve_offload(s.rho.rho, rates, sc.local_cpu, cfg);
        s.rho.rho = fp.rho;
    };

    // Convergence is judged on recorded iterates only (the move from the
    // cold start to the first full iterate is not an improvement step).
    std::vector<double> safety_trace;

    out.hit_outer_cap = true;
    for (int k = 1; k <= opts.outer_cap; ++k) {
        const auto iter_t0 = clock::now();

        // Block 1: offloading ratios (exact per-CV solve; always improves).
        if (opts.optimize_rho) {
            const auto rates = rates_for(st, cs, cfg, opts.mode);
            const FpState fp = solve_offload(st.rho.rho, rates, sc.local_cpu, cfg);
            if (fp.hit_iteration_cap) out.flags.push_back("offload iteration cap");
            BlockState cand = st;
            cand.rho.rho = fp.rho;
            if (score(cand) <= score(st)) st = std::move(cand);
        }

        // Block 2: spectrum sharing (relaxed). The solver owns the
        // service-vs-delay trade (its objective carries the sharing bonus),
        // so its result is adopted subject only to the outage guard; the
        // offloading ratios re-fit to the new rates.
        if (opts.optimize_alpha) {
            const SpectrumResult sr = solve_spectrum_sca(
                st.alpha, cs, st.profile, st.rho, sc.local_cpu, cfg, opts.mode);
            if (sr.infeasible_start) out.flags.push_back("spectrum infeasible start");
            BlockState cand = st;
            cand.alpha = sr.alpha;
            refit_rho(cand);
            if (outage_violation_of(cand, cs, cfg, opts.mode, gamma_c) <=
                outage_violation_of(st, cs, cfg, opts.mode, gamma_c) + 1e-9)
                st = std::move(cand);
        }

        // Block 3: reflection/refraction profile. Each CV's rate term is
        // weighted by its safety sensitivity dS/dR at the current iterate so
        // the shared profile is pulled where delay is actually rate-bound.
        if (opts.optimize_phase) {
            PhaseOptions popt;
            popt.reflect_only = (opts.mode == RicsMode::reflect_only);
            {
                const auto rates = rates_for(st, cs, cfg, opts.mode);
                std::vector<double> w(cs.num_cvs, 0.0);
                double mean = 0.0;
                for (int m = 0; m < cs.num_cvs; ++m) {
                    const double r = st.rho.rho[m];
                    if (r > 0.0 && rates[m] > 0.0) {
                        const DelayTriple d =
                            delays(r, rates[m], sc.local_cpu[m], cfg);
                        if (d.offload_s >= d.local_s - 1e-12) {
                            const double s_m =
                                avg_accuracy(r, cfg.accuracy_ratio, cfg.edge_accuracy) /
                                d.total_s;
                            w[m] = s_m / d.total_s * r * cfg.task_bits / rates[m];
                        }
                    }
                    mean += w[m];
                }
                mean /= cs.num_cvs;
                if (mean > 0.0) {
                    for (auto& v : w) v = std::max(v / mean, 1e-3);
                    popt.rate_weights = std::move(w);
                }
            }
            const PhaseResult pr =
                solve_phases(cs, st.alpha, cfg, st.profile, popt);
            if (pr.round_cap_hit) out.flags.push_back("phase round cap");
            BlockState cand = st;
            cand.profile = pr.profile;
            refit_rho(cand);
            if (score(cand) <= score(st)) st = std::move(cand);
        }

        // Psi refresh right after the phase solve (refraction amplitudes).
        if (opts.optimize_psi && opts.mode == RicsMode::full) {
            const AmplitudeResult ar =
                solve_amplitude_gd(cs, st.alpha, st.profile, cfg, opts.amplitude);
            if (ar.hit_iteration_cap) out.flags.push_back("psi iteration cap");
            BlockState cand = st;
            cand.profile.psi = ar.psi;
            if (score(cand) <= score(st)) st = std::move(cand);
        }

        OuterIterate it;
        it.iter = k;
        it.sum_safety = sum_safety_of(st, cs, sc, cfg, opts.mode);
        double min_margin = std::numeric_limits<double>::infinity();
        double v2v_sum = 0.0;
        for (int n = 0; n < cs.num_pairs; ++n) {
            min_margin = std::min(
                min_margin,
                expected_v2v_sinr(n, cs, st.profile, st.alpha, cfg, opts.mode) -
                    gamma_c);
            v2v_sum += rate(sinr_v2v(n, cs, st.profile, st.alpha, cfg, opts.mode),
                            cfg.bandwidth);
        }
        it.outage_margin = min_margin;
        it.sum_v2v_rate_bps = v2v_sum;
        it.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - iter_t0)
                         .count();
        out.iterations.push_back(it);
        safety_trace.push_back(it.sum_safety);

        if (check_convergence(safety_trace, cfg.aioa_tol)) {
            out.converged = true;
            out.hit_outer_cap = false;
            break;
        }
    }

    // Final binary assignment (checked against the final profile).
    out.rho = st.rho;
    out.profile = st.profile;
    if (st.alpha.binary) {
        out.alpha = st.alpha;
    } else {
        out.alpha = round_assignment(st.alpha, cs, st.profile, cfg, opts.mode);
    }
    BlockState fin{out.rho, out.alpha, out.profile};
    out.final_sum_safety = sum_safety_of(fin, cs, sc, cfg, opts.mode);
    double v2v = 0.0;
    for (int n = 0; n < cs.num_pairs; ++n)
        v2v += rate(sinr_v2v(n, cs, out.profile, out.alpha, cfg, opts.mode),
                    cfg.bandwidth);
    out.final_sum_v2v_rate_bps = v2v;
    return out;
}

}  // namespace rics
