#include "rics/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "rics/solver_amplitude.hpp"
#include "rics/solver_phase.hpp"
#include "rics/solver_spectrum.hpp"

namespace rics {

namespace {

constexpr std::uint64_t kChannelTag = 0x4348414eULL;  // channel draws
constexpr std::uint64_t kSchemeTag = 0x5343484dULL;   // scheme randomness

std::uint64_t scheme_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

SpectrumAssignment random_matching(const ScenarioConfig& cfg, const ChannelSet& cs,
                                   const RicsProfile& profile, RicsMode mode,
                                   std::mt19937_64& rng) {
    auto a = SpectrumAssignment::zeros(cfg.num_cvs, cfg.num_v2v_pairs, true);
    std::vector<int> cvs(cfg.num_cvs);
    std::iota(cvs.begin(), cvs.end(), 0);
    for (int i = static_cast<int>(cvs.size()) - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(cvs[i], cvs[pick(rng)]);
    }
    for (int n = 0; n < cfg.num_v2v_pairs; ++n) {
        if (n >= cfg.num_cvs) break;  // each CV shares at most one channel
        a.alpha[cvs[n]][n] = 1.0;
    }
    // Admission control: drop shares that break the outage surrogate.
    const double gamma_c =
        outage_threshold(cfg.sinr_threshold, cfg.smooth_param, cfg.outage_cap);
    for (int n = 0; n < cfg.num_v2v_pairs; ++n) {
        if (expected_v2v_sinr(n, cs, profile, a, cfg, mode) < gamma_c) {
            for (int m = 0; m < cfg.num_cvs; ++m) a.alpha[m][n] = 0.0;
        }
    }
    return a;
}

}  // namespace

const std::vector<std::string>& known_schemes() {
    static const std::vector<std::string> ids = {
        "aioa",        "rand_offload", "rand_phase",   "rand_spectrum",
        "fixed_psi",   "rand_psi",     "star_ris",     "ris_only",
        "no_ris",      "total_offload", "total_local", "rand_binary_offload"};
    return ids;
}

DetailedRun run_scheme_detailed(const std::string& scheme,
                                const ScenarioConfig& cfg, std::uint64_t seed) {
    if (std::find(known_schemes().begin(), known_schemes().end(), scheme) ==
        known_schemes().end())
        throw UnknownScheme("unknown scheme id: " + scheme);

    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = build_scenario(cfg, seed);
    const ChannelSet cs =
        assemble_channels(sc, cfg, substream_seed(seed, kChannelTag));

    AioaOptions opts;
    opts.seed = seed;
    auto rng = substream(seed, kSchemeTag, scheme_hash(scheme));

    if (scheme == "rand_offload" || scheme == "rand_binary_offload" ||
        scheme == "total_offload" || scheme == "total_local") {
        opts.optimize_rho = false;
        std::vector<double> rho(cfg.num_cvs, 0.0);
        if (scheme == "rand_offload") {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (auto& r : rho) r = u(rng);
        } else if (scheme == "rand_binary_offload") {
            std::bernoulli_distribution b(0.5);
            for (auto& r : rho) r = b(rng) ? 1.0 : 0.0;
        } else if (scheme == "total_offload") {
            std::fill(rho.begin(), rho.end(), 1.0);
        }
        opts.fixed_rho = rho;
    } else if (scheme == "rand_phase") {
        opts.optimize_phase = false;
        opts.fixed_profile = random_profile(cfg.num_elements,
                                            substream_seed(seed, kSchemeTag, 1));
    } else if (scheme == "rand_spectrum") {
        opts.optimize_alpha = false;  // assignment fixed below
    } else if (scheme == "fixed_psi") {
        opts.optimize_psi = false;
        opts.fixed_psi = std::vector<double>(cfg.num_elements, 1.2);
    } else if (scheme == "rand_psi") {
        opts.optimize_psi = false;
        std::vector<double> psi(cfg.num_elements);
        std::uniform_real_distribution<double> u(1.0, 2.0);
        for (auto& v : psi) v = u(rng);
        opts.fixed_psi = psi;
    } else if (scheme == "star_ris") {
        opts.optimize_psi = false;
        opts.fixed_psi = std::vector<double>(cfg.num_elements, 1.0);
    } else if (scheme == "ris_only") {
        opts.mode = RicsMode::reflect_only;
        opts.optimize_psi = false;
    } else if (scheme == "no_ris") {
        opts.mode = RicsMode::off;
        opts.optimize_phase = false;
        opts.optimize_psi = false;
    }

    if (scheme == "rand_spectrum") {
        const RicsProfile init = initial_profile(cfg.num_elements, seed);
        opts.fixed_alpha = random_matching(cfg, cs, init, opts.mode, rng);
    }

    DetailedRun run;
    run.trace = run_aioa(sc, cs, cfg, opts);
    run.report = evaluate_solution(cs, sc, run.trace.profile, run.trace.rho,
                                   run.trace.alpha, cfg, opts.mode);

    RunResult& row = run.row;
    row.seed = seed;
    row.scheme = scheme;
    row.m_cnt = cfg.num_cvs;
    row.n_cnt = cfg.num_v2v_pairs;
    row.l_cnt = cfg.num_elements;
    row.pm_dbm = cfg.cv_power;
    row.pt_dbm = cfg.v2v_power;
    row.d_rics_m = cfg.rics_bs_distance();
    row.s_m_bits = cfg.task_bits;
    row.sum_safety = run.report.sum_safety;
    row.mean_safety = run.report.mean_safety;
    row.sum_v2v_rate_bps = run.report.sum_v2v_rate_bps;
    row.outer_iters = static_cast<int>(run.trace.iterations.size());
    row.converged = run.trace.converged;
    row.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return run;
}

RunResult run_scheme(const std::string& scheme, const ScenarioConfig& cfg,
                     std::uint64_t seed) {
    return run_scheme_detailed(scheme, cfg, seed).row;
}

ScenarioConfig apply_sweep_param(const ScenarioConfig& base,
                                 const std::string& param, double value) {
    ScenarioConfig cfg = base;
    if (param == "cv_power") {
        cfg.cv_power = value;
    } else if (param == "v2v_power") {
        cfg.v2v_power = value;
    } else if (param == "d_rics") {
        cfg.rics_position =
            Vec3{cfg.bs_position.x + value, cfg.bs_position.y, cfg.rics_position.z};
    } else if (param == "task_bits") {
        cfg.task_bits = value;
    } else if (param == "num_cvs") {
        cfg.num_cvs = static_cast<int>(std::lround(value));
    } else if (param == "num_elements") {
        cfg.num_elements = static_cast<int>(std::lround(value));
    } else {
        throw DomainError("unknown sweep parameter: " + param);
    }
    return cfg;
}

int worker_count() {
    if (const char* env = std::getenv("RICS_SIM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<RunResult> sweep(const std::string& param, double from, double to,
                             double step, const std::vector<std::string>& schemes,
                             const std::vector<std::uint64_t>& seeds,
                             const ScenarioConfig& cfg) {
    if (step <= 0.0) throw DomainError("sweep: step must be positive");
    std::vector<double> values;
    for (double v = from; v <= to + 1e-9 * std::fabs(step); v += step)
        values.push_back(v);

    struct Cell {
        double value;
        std::string scheme;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double v : values)
        for (const auto& s : schemes)
            for (auto seed : seeds) cells.push_back({v, s, seed});

    std::vector<RunResult> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            const ScenarioConfig cell_cfg =
                apply_sweep_param(cfg, param, cells[i].value);
            rows[i] = run_scheme(cells[i].scheme, cell_cfg, cells[i].seed);
        }
    };
    const int pool = std::min<int>(worker_count(), std::max<std::size_t>(cells.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return rows;  // cell order is already (param, scheme, seed)-sorted
}

namespace {

std::string fmt(double v) {
    std::ostringstream oss;
    oss.precision(10);
    oss << v;
    return oss.str();
}

}  // namespace

std::string results_to_csv(const std::vector<RunResult>& rows) {
    std::ostringstream oss;
    oss << "seed,scheme,M,N,L,pm_dbm,pt_dbm,d_rics_m,s_m_bits,sum_safety,"
           "mean_safety,sum_v2v_rate_bps,outer_iters,converged,wall_ms\n";
    for (const auto& r : rows) {
        oss << r.seed << ',' << r.scheme << ',' << r.m_cnt << ',' << r.n_cnt << ','
            << r.l_cnt << ',' << fmt(r.pm_dbm) << ',' << fmt(r.pt_dbm) << ','
            << fmt(r.d_rics_m) << ',' << fmt(r.s_m_bits) << ','
            << fmt(r.sum_safety) << ',' << fmt(r.mean_safety) << ','
            << fmt(r.sum_v2v_rate_bps) << ',' << r.outer_iters << ','
            << (r.converged ? 1 : 0) << ',' << fmt(r.wall_ms) << '\n';
    }
    return oss.str();
}

std::string report_to_csv(const SafetyReport& report, const ScenarioConfig& cfg) {
    std::ostringstream oss;
    oss << "cv,rho,rate_bps,tau_local_s,tau_offload_s,tau_s,accuracy,safety";
    if (cfg.max_delay) oss << ",max_delay_s";
    oss << '\n';
    for (const auto& r : report.rows) {
        oss << r.cv << ',' << fmt(r.rho) << ',' << fmt(r.rate_bps) << ','
            << fmt(r.tau_local_s) << ',' << fmt(r.tau_offload_s) << ','
            << fmt(r.tau_s) << ',' << fmt(r.accuracy) << ',' << fmt(r.safety);
        if (cfg.max_delay) oss << ',' << fmt(*cfg.max_delay);
        oss << '\n';
    }
    return oss.str();
}

std::string trace_to_csv(const SolverTrace& trace) {
    std::ostringstream oss;
    oss << "iter,sum_safety,sum_v2v_rate_bps,outage_margin,wall_ms\n";
    for (const auto& it : trace.iterations)
        oss << it.iter << ',' << fmt(it.sum_safety) << ','
            << fmt(it.sum_v2v_rate_bps) << ',' << fmt(it.outage_margin) << ','
            << fmt(it.wall_ms) << '\n';
    return oss.str();
}

// ---------------------------------------------------------------------------
// Validation suites wrapping the independent oracles.
// ---------------------------------------------------------------------------

namespace {

ValidationReport validate_mc_expectation(const ScenarioConfig& base) {
    ValidationReport rep;
    rep.suite = "mc-expectation";

    ScenarioConfig cfg = base;
    cfg.num_cvs = 2;
    cfg.num_v2v_pairs = 2;
    cfg.num_elements = 8;
    const Scenario sc = build_scenario(cfg, 7);
    const ChannelSet cs = assemble_channels(sc, cfg, 7);

    RicsProfile prof = random_profile(cfg.num_elements, 11);
    for (int l = 0; l < cfg.num_elements; ++l) prof.psi[l] = 0.8 + 0.05 * l;

    const CVec refr = refraction_coeffs(prof);
    const double kappa = cfg.rician_factor;
    const double w_los = std::sqrt(kappa / (1.0 + kappa));
    const double w_nlos = std::sqrt(1.0 / (1.0 + kappa));
    constexpr int kDraws = 1000000;

    bool all_ok = true;
    auto rng = substream(99, 0x4d43ULL);
    for (int m = 0; m < cfg.num_cvs; ++m) {
        for (int n = 0; n < cfg.num_v2v_pairs; ++n) {
            // Closed form for one (m, n) term.
            cplx h1 = 0.0;
            double t_power = 0.0;
            for (int l = 0; l < cfg.num_elements; ++l) {
                h1 += std::conj(cs.los_Rn[n][l]) * refr[l] * cs.los_mR[m][l];
                t_power += std::norm(refr[l]);
            }
            h1 *= kappa;  // sqrt(kappa_Rn * kappa_mR) with equal kappas
            const double scale = cs.pl_Rn[n] * cs.pl_mR[m];
            const double closed =
                cs.pl_mn[m][n] * cs.pl_mn[m][n] +
                scale * scale * (std::norm(h1) + t_power * (2.0 * kappa + 1.0)) /
                    ((1.0 + kappa) * (1.0 + kappa));

            double acc = 0.0;
            for (int d = 0; d < kDraws; ++d) {
                cplx interf = cs.pl_mn[m][n] * complex_gaussian(rng);
                for (int l = 0; l < cfg.num_elements; ++l) {
                    const cplx hmr = cs.pl_mR[m] * (w_los * cs.los_mR[m][l] +
                                                    w_nlos * complex_gaussian(rng));
                    const cplx hrn = cs.pl_Rn[n] * (w_los * cs.los_Rn[n][l] +
                                                    w_nlos * complex_gaussian(rng));
                    interf += std::conj(hrn) * refr[l] * hmr;
                }
                acc += std::norm(interf);
            }
            const double mc = acc / kDraws;
            const double rel = std::fabs(mc - closed) / closed;
            all_ok = all_ok && rel <= 0.02;
            std::ostringstream line;
            line << "pair (" << m << ',' << n << "): closed=" << closed
                 << " mc=" << mc << " rel=" << rel
                 << (rel <= 0.02 ? " ok" : " FAIL");
            rep.lines.push_back(line.str());
        }
    }
    rep.passed = all_ok;
    return rep;
}

ValidationReport validate_gradcheck(const ScenarioConfig& base) {
    ValidationReport rep;
    rep.suite = "gradcheck";

    ScenarioConfig cfg = base;
    cfg.num_cvs = 3;
    cfg.num_v2v_pairs = 3;
    cfg.num_elements = 6;
    const Scenario sc = build_scenario(cfg, 21);
    const ChannelSet cs = assemble_channels(sc, cfg, 21);
    const RicsProfile prof = random_profile(cfg.num_elements, 5);
    bool all_ok = true;
    constexpr double kTol = 1e-5;

    // (a) SCA linearization gradient of q_m.
    {
        std::vector<double> row = {0.3, 0.5, 0.1};
        const auto lin = taylor_linearize_q(0, row, cs, cfg);
        double worst = 0.0;
        for (std::size_t n = 0; n < row.size(); ++n) {
            const double h = 1e-6;
            auto hi = row, lo = row;
            hi[n] += h;
            lo[n] -= h;
            auto q_of = [&](const std::vector<double>& r) {
                double interf = cfg.noise_watt();
                for (std::size_t i = 0; i < r.size(); ++i)
                    interf += std::norm(cs.h_nB[i]) * cfg.v2v_power_watt() * r[i];
                return cfg.bandwidth * std::log2(interf);
            };
            const double fd = (q_of(hi) - q_of(lo)) / (2.0 * h);
            worst = std::max(worst, std::fabs(fd - lin.grad[n]) /
                                        std::max(1.0, std::fabs(fd)));
        }
        all_ok = all_ok && worst <= kTol;
        rep.lines.push_back("q-linearization gradient: rel err " +
                            std::to_string(worst) +
                            (worst <= kTol ? " ok" : " FAIL"));
    }

    // (b) psi least-squares gradient.
    {
        SpectrumAssignment a = SpectrumAssignment::zeros(cfg.num_cvs, cfg.num_v2v_pairs);
        for (int m = 0; m < cfg.num_cvs; ++m) a.alpha[m][m % cfg.num_v2v_pairs] = 1.0;
        std::vector<double> psi(cfg.num_elements);
        for (int l = 0; l < cfg.num_elements; ++l) psi[l] = 0.9 + 0.07 * l;
        const auto grad = ls_gradient(psi, cs, a, prof, cfg);
        double worst = 0.0;
        for (int l = 0; l < cfg.num_elements; ++l) {
            const double h = 1e-6;
            auto hi = psi, lo = psi;
            hi[l] += h;
            lo[l] -= h;
            const double fd = (ls_objective(hi, cs, a, prof, cfg) -
                               ls_objective(lo, cs, a, prof, cfg)) /
                              (2.0 * h);
            const double scale = std::max(std::fabs(fd), 1e-12);
            worst = std::max(worst, std::fabs(fd - grad[l]) / scale);
        }
        all_ok = all_ok && worst <= kTol;
        rep.lines.push_back("psi LS gradient: rel err " + std::to_string(worst) +
                            (worst <= kTol ? " ok" : " FAIL"));
    }

    // (c) phase beamformer Wirtinger gradient (2L real coordinates).
    {
        SpectrumAssignment a = SpectrumAssignment::zeros(cfg.num_cvs, cfg.num_v2v_pairs);
        for (int m = 0; m < cfg.num_cvs; ++m) a.alpha[m][m % cfg.num_v2v_pairs] = 1.0;
        PhaseOptions popt;
        PhaseWorkspace ws(cs, a, cfg, prof.psi, popt);
        const int len = cfg.num_elements;
        CVec v_t(len), v_r(len), vt_tilde(len), vr_tilde(len);
        auto rng = substream(3, 0x464447ULL);
        for (int l = 0; l < len; ++l) {
            v_t[l] = complex_gaussian(rng);
            v_r[l] = complex_gaussian(rng);
            vt_tilde[l] = complex_gaussian(rng);
            vr_tilde[l] = complex_gaussian(rng);
        }
        const double eta = 0.7, weight = 2.0;
        CVec gt, gr;
        ws.gradient(v_t, v_r, vt_tilde, vr_tilde, eta, weight, gt, gr);
        double worst = 0.0;
        const double h = 1e-6;
        auto probe = [&](CVec& vec, int l, bool imag, double delta) {
            cplx save = vec[l];
            vec[l] += imag ? cplx(0.0, delta) : cplx(delta, 0.0);
            const double val =
                ws.objective(v_t, v_r, vt_tilde, vr_tilde, eta, weight);
            vec[l] = save;
            return val;
        };
        for (int l = 0; l < len; ++l) {
            for (bool imag : {false, true}) {
                const double fd_t =
                    (probe(v_t, l, imag, h) - probe(v_t, l, imag, -h)) / (2.0 * h);
                const double an_t = 2.0 * (imag ? gt[l].imag() : gt[l].real());
                const double fd_r =
                    (probe(v_r, l, imag, h) - probe(v_r, l, imag, -h)) / (2.0 * h);
                const double an_r = 2.0 * (imag ? gr[l].imag() : gr[l].real());
                worst = std::max(worst, std::fabs(fd_t - an_t) /
                                            std::max(1.0, std::fabs(fd_t)));
                worst = std::max(worst, std::fabs(fd_r - an_r) /
                                            std::max(1.0, std::fabs(fd_r)));
            }
        }
        all_ok = all_ok && worst <= kTol;
        rep.lines.push_back("phase beamformer gradient: rel err " +
                            std::to_string(worst) +
                            (worst <= kTol ? " ok" : " FAIL"));
    }

    rep.passed = all_ok;
    return rep;
}

ValidationReport validate_phase_grid(const ScenarioConfig&) {
    ValidationReport rep;
    rep.suite = "phase-grid";
    auto rng = substream(17, 0x50474dULL);
    bool all_ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const cplx v_t = complex_gaussian(rng);
        const cplx v_r = complex_gaussian(rng);

        // Closed forms alternated to their fixed point per branch, from a few
        // amplitude starts (exactly what the solver applies across rounds).
        double best_closed = -1e300;
        for (double offset : {kPi / 2.0, 1.5 * kPi}) {
            for (double bt0 : {0.05, 0.5, 0.95}) {
                double sbt = std::sqrt(bt0);
                double sbr = std::sqrt(1.0 - bt0);
                double value = -1e300;
                for (int it = 0; it < 100; ++it) {
                    const PhaseBranches br =
                        coupled_phase_update(v_t * sbt, v_r * sbr);
                    const double theta = offset == kPi / 2.0
                                             ? br.theta_t_quarter
                                             : br.theta_t_three_quarter;
                    const double a = (std::conj(v_t) * std::polar(1.0, theta)).real();
                    const double b =
                        (std::conj(v_r) * std::polar(1.0, theta + offset)).real();
                    std::tie(sbt, sbr) = coupled_amplitude_update(a, b);
                    const double now = a * sbt + b * sbr;
                    if (now <= value + 1e-14) {
                        value = std::max(value, now);
                        break;
                    }
                    value = now;
                }
                best_closed = std::max(best_closed, value);
            }
        }

        double best_grid = -1e300;
        constexpr int kThetaPts = 400;
        constexpr int kBetaPts = 100;
        for (int bi = 0; bi <= kBetaPts; ++bi) {
            const double bt = static_cast<double>(bi) / kBetaPts;
            const double sbt = std::sqrt(bt);
            const double sbr = std::sqrt(1.0 - bt);
            for (int ti = 0; ti < kThetaPts; ++ti) {
                const double theta = 2.0 * kPi * ti / kThetaPts;
                for (double offset : {kPi / 2.0, 1.5 * kPi}) {
                    const double val =
                        (std::conj(v_t) * std::polar(sbt, theta)).real() +
                        (std::conj(v_r) * std::polar(sbr, theta + offset)).real();
                    best_grid = std::max(best_grid, val);
                }
            }
        }
        worst = std::max(worst, best_grid - best_closed);
        all_ok = all_ok && (best_closed >= best_grid - 1e-3);
    }
    rep.lines.push_back("closed-form vs grid max shortfall: " + std::to_string(worst) +
                        (all_ok ? " ok" : " FAIL"));
    rep.passed = all_ok;
    return rep;
}

}  // namespace

ValidationReport validate(const std::string& suite, const ScenarioConfig& cfg) {
    if (suite == "mc-expectation") return validate_mc_expectation(cfg);
    if (suite == "gradcheck") return validate_gradcheck(cfg);
    if (suite == "phase-grid") return validate_phase_grid(cfg);
    throw DomainError("unknown validation suite: " + suite);
}

}  // namespace rics
