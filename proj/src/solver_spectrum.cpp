#include "rics/solver_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rics {

double lse_delay_bound(double tau_local, double tau_offload) {
    const double hi = std::max(tau_local, tau_offload);
    const double lo = std::min(tau_local, tau_offload);
    return hi + std::log1p(std::exp(lo - hi));
}

namespace {

struct RateData {
    std::vector<double> xi1;  // P_m |h_mB + reflect cascade|^2 per CV
    std::vector<double> xi2;  // |h_nB|^2 per pair
    double p_t = 0.0;
    double noise = 0.0;
    double w = 0.0;
};

RateData make_rate_data(const ChannelSet& cs, const RicsProfile& p,
                        const ScenarioConfig& cfg, RicsMode mode) {
    RateData rd;
    rd.p_t = cfg.v2v_power_watt();
    rd.noise = cfg.noise_watt();
    rd.w = cfg.bandwidth;
    rd.xi1.resize(cs.num_cvs);
    const CVec refl = reflection_coeffs(p);
    for (int m = 0; m < cs.num_cvs; ++m) {
        cplx gain = cs.h_mB[m];
        if (mode != RicsMode::off)
            gain = cascaded_gain(cs.h_RB, refl, cs.h_mR[m], cs.h_mB[m]);
        rd.xi1[m] = cfg.cv_power_watt() * std::norm(gain);
    }
    rd.xi2.resize(cs.num_pairs);
    for (int n = 0; n < cs.num_pairs; ++n) rd.xi2[n] = std::norm(cs.h_nB[n]);
    return rd;
}

double interference_sum(const RateData& rd, const std::vector<double>& row) {
    double s = rd.noise;
    for (std::size_t n = 0; n < row.size(); ++n)
        s += rd.xi2[n] * rd.p_t * row[n];
    return s;
}

/// Expected-SINR constraint data: gamma_n(alpha) = num_n / (sum_m alpha_mn
/// c_mn + noise).
struct OutageData {
    std::vector<double> num;                  // per pair
    std::vector<std::vector<double>> coef;    // M x N, P_m * E[|interf|^2]
    double noise = 0.0;
    double gamma_c = 0.0;
};

OutageData make_outage_data(const ChannelSet& cs, const RicsProfile& p,
                            const ScenarioConfig& cfg, RicsMode mode) {
    OutageData od;
    od.noise = cfg.noise_watt();
    od.gamma_c =
        outage_threshold(cfg.sinr_threshold, cfg.smooth_param, cfg.outage_cap);
    od.num.resize(cs.num_pairs);
    od.coef.assign(cs.num_cvs, std::vector<double>(cs.num_pairs, 0.0));
    const double p_m = cfg.cv_power_watt();
    const double p_t = cfg.v2v_power_watt();
    const double kr = cs.kappa_Rn;
    const double km = cs.kappa_mR;
    const bool refracting = (mode == RicsMode::full);
    CVec refr;
    double t_power = 0.0;
    if (refracting) {
        refr = refraction_coeffs(p);
        for (const auto& s : refr) t_power += std::norm(s);
    }
    for (int n = 0; n < cs.num_pairs; ++n) {
        od.num[n] = p_t * cs.pl_n[n] * cs.pl_n[n];
        for (int m = 0; m < cs.num_cvs; ++m) {
            double expected = cs.pl_mn[m][n] * cs.pl_mn[m][n];
            if (refracting) {
                cplx h1 = 0.0;
                for (int l = 0; l < cs.num_elements; ++l)
                    h1 += std::conj(cs.los_Rn[n][l]) * refr[l] * cs.los_mR[m][l];
                h1 *= std::sqrt(kr * km);
                const double scale = cs.pl_Rn[n] * cs.pl_mR[m];
                expected += scale * scale *
                            (std::norm(h1) + t_power * (kr + km + 1.0)) /
                            ((1.0 + kr) * (1.0 + km));
            }
            od.coef[m][n] = p_m * expected;
        }
    }
    return od;
}

double expected_sinr_of(const OutageData& od,
                        const std::vector<std::vector<double>>& alpha, int n) {
    double den = od.noise;
    for (std::size_t m = 0; m < alpha.size(); ++m)
        den += alpha[m][n] * od.coef[m][n];
    return od.num[n] / den;
}

/// Deterministic tie-break multipliers so the sharing bonus has a unique
/// maximizing vertex per row AND rows prefer pairwise-distinct columns (a
/// fixed pseudo-random permutation keyed by the problem shape alone). The
/// spread dominates the tiny per-scheme cost differences, keeping pair
/// selection identical across benchmark variants and avoiding pile-ups.
struct TieWeights {
    std::vector<std::vector<double>> w;

    TieWeights(int m_cnt, int n_cnt) : w(m_cnt, std::vector<double>(n_cnt)) {
        std::vector<int> perm(n_cnt);
        std::iota(perm.begin(), perm.end(), 0);
        auto rng = substream(0x54494552ULL, static_cast<std::uint64_t>(m_cnt),
                             static_cast<std::uint64_t>(n_cnt));
        for (int i = n_cnt - 1; i > 0; --i) {
            std::uniform_int_distribution<int> pick(0, i);
            std::swap(perm[i], perm[pick(rng)]);
        }
        for (int m = 0; m < m_cnt; ++m) {
            for (int n = 0; n < n_cnt; ++n) {
                const std::uint64_t z =
                    substream_seed(0x54494553ULL, 0, static_cast<std::uint64_t>(m),
                                   static_cast<std::uint64_t>(n));
                const double jitter =
                    0.08 * static_cast<double>(z % 1000003ULL) / 1000003.0;
                w[m][n] = 1.0 + jitter + (perm[m % n_cnt] == n ? 0.1 : 0.0);
            }
        }
    }
};

}  // namespace

std::vector<double> project_row_box_simplex(std::vector<double> row,
                                            double budget) {
    for (double& v : row) v = std::clamp(v, 0.0, 1.0);
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum <= budget) return row;

    double lo = 0.0, hi = 0.0;
    for (double v : row) hi = std::max(hi, v);
    for (int it = 0; it < 64; ++it) {
        const double theta = 0.5 * (lo + hi);
        double s = 0.0;
        for (double v : row) s += std::clamp(v - theta, 0.0, 1.0);
        if (s > budget)
            lo = theta;
        else
            hi = theta;
    }
    for (double& v : row) v = std::clamp(v - hi, 0.0, 1.0);
    return row;
}

DcParts rate_dc_parts(int m, const std::vector<std::vector<double>>& alpha,
                      const ChannelSet& cs, const RicsProfile& p,
                      const ScenarioConfig& cfg, RicsMode mode) {
    const RateData rd = make_rate_data(cs, p, cfg, mode);
    const double interf = interference_sum(rd, alpha[m]);
    DcParts parts;
    parts.p = rd.w * std::log2(rd.xi1[m] + interf);
    parts.q = rd.w * std::log2(interf);
    return parts;
}

double LinearizedQ::eval(const std::vector<double>& row) const {
    double v = value_at_point;
    for (std::size_t n = 0; n < row.size(); ++n)
        v += grad[n] * (row[n] - point[n]);
    return v;
}

LinearizedQ taylor_linearize_q(int m, const std::vector<double>& alpha_row,
                               const ChannelSet& cs, const ScenarioConfig& cfg) {
    (void)m;
    LinearizedQ lin;
    lin.point = alpha_row;
    const double p_t = cfg.v2v_power_watt();
    double interf = cfg.noise_watt();
    for (std::size_t n = 0; n < alpha_row.size(); ++n)
        interf += std::norm(cs.h_nB[n]) * p_t * alpha_row[n];
    lin.value_at_point = cfg.bandwidth * std::log2(interf);
    lin.grad.resize(alpha_row.size());
    for (std::size_t n = 0; n < alpha_row.size(); ++n)
        lin.grad[n] =
            cfg.bandwidth * std::norm(cs.h_nB[n]) * p_t / (interf * std::log(2.0));
    return lin;
}

namespace {

struct SmoothedObjective {
    const RateData* rd = nullptr;
    const OutageData* od = nullptr;
    std::vector<LinearizedQ> q_hat;        // per CV, at the SCA point
    std::vector<double> rho;
    std::vector<double> tau_local;
    double task_bits = 0.0;
    double edge_delay = 0.0;               // c_m / F
    double share_bonus = 0.0;
    double integrality_weight = 0.0;       // pushes relaxed entries to {0,1}
    double outage_weight = 0.0;
    bool use_q_hat = true;                 // false: exact q (true objective)
    const TieWeights* ties = nullptr;

    double rate_hat(int m, const std::vector<double>& row) const {
        const double interf = interference_sum(*rd, row);
        const double p = rd->w * std::log2(rd->xi1[m] + interf);
        const double q = use_q_hat ? q_hat[m].eval(row) : rd->w * std::log2(interf);
        return std::max(p - q, 1.0);  // positivity floor
    }

    // Previewed offload delays saturate at a hopelessness horizon beyond the
    // local delay; the linearized rate can collapse to ~zero and the smoothed
    // objective must stay bounded (and scheme-comparable) there.
    static constexpr double kTauHorizon = 30.0;  // seconds

    double tau_offload(int m, const std::vector<double>& row) const {
        if (rho[m] <= 0.0) return 0.0;
        const double tau =
            rho[m] * (task_bits / rate_hat(m, row) + edge_delay);
        return std::min(tau, tau_local[m] + kTauHorizon);
    }

    double value(const std::vector<std::vector<double>>& alpha) const {
        double j = 0.0;
        for (std::size_t m = 0; m < alpha.size(); ++m) {
            j += lse_delay_bound(tau_local[m],
                                 tau_offload(static_cast<int>(m), alpha[m]));
            for (std::size_t n = 0; n < alpha[m].size(); ++n) {
                j -= share_bonus * ties->w[m][n] * alpha[m][n];
                j += integrality_weight * alpha[m][n] * (1.0 - alpha[m][n]);
            }
        }
        for (std::size_t n = 0; n < od->num.size(); ++n) {
            const double g = expected_sinr_of(*od, alpha, static_cast<int>(n));
            const double viol = std::max(0.0, (od->gamma_c - g) / od->gamma_c);
            j += outage_weight * viol * viol;
        }
        return j;
    }

    void gradient(const std::vector<std::vector<double>>& alpha,
                  std::vector<std::vector<double>>& grad) const {
        const std::size_t m_cnt = alpha.size();
        const std::size_t n_cnt = alpha.empty() ? 0 : alpha[0].size();
        grad.assign(m_cnt, std::vector<double>(n_cnt, 0.0));

        for (std::size_t m = 0; m < m_cnt; ++m) {
            const double interf = interference_sum(*rd, alpha[m]);
            const double p = rd->w * std::log2(rd->xi1[m] + interf);
            const double q =
                use_q_hat ? q_hat[m].eval(alpha[m]) : rd->w * std::log2(interf);
            const double r = p - q;
            const double tau_raw =
                rho[m] > 0.0
                    ? rho[m] * (task_bits / std::max(r, 1.0) + edge_delay)
                    : 0.0;
            const bool floored =
                r <= 1.0 || tau_raw >= tau_local[m] + kTauHorizon;
            const double tau_o = std::min(tau_raw, tau_local[m] + kTauHorizon);
            // softmax weight of the offload branch inside the LSE
            const double hi = std::max(tau_local[m], tau_o);
            const double eo = std::exp(tau_o - hi);
            const double el = std::exp(tau_local[m] - hi);
            const double sigma = eo / (el + eo);
            for (std::size_t n = 0; n < n_cnt; ++n) {
                double g = integrality_weight * (1.0 - 2.0 * alpha[m][n]) -
                           share_bonus * ties->w[m][n];
                if (rho[m] > 0.0 && !floored) {
                    const double dp = rd->w * rd->xi2[n] * rd->p_t /
                                      ((rd->xi1[m] + interf) * std::log(2.0));
                    const double dq =
                        use_q_hat ? q_hat[m].grad[n]
                                  : rd->w * rd->xi2[n] * rd->p_t /
                                        (interf * std::log(2.0));
                    const double dr = dp - dq;
                    g += sigma * rho[m] * task_bits * (-dr) / (r * r);
                }
                grad[m][n] += g;
            }
        }

        for (std::size_t n = 0; n < n_cnt; ++n) {
            double den = od->noise;
            for (std::size_t m = 0; m < m_cnt; ++m)
                den += alpha[m][n] * od->coef[m][n];
            const double g_n = od->num[n] / den;
            const double viol = std::max(0.0, (od->gamma_c - g_n) / od->gamma_c);
            if (viol <= 0.0) continue;
            const double scale = outage_weight * 2.0 * viol / od->gamma_c;
            for (std::size_t m = 0; m < m_cnt; ++m)
                grad[m][n] += scale * od->num[n] * od->coef[m][n] / (den * den);
        }
    }
};

}  // namespace

SpectrumResult solve_spectrum_sca(const SpectrumAssignment& alpha0,
                                  const ChannelSet& cs, const RicsProfile& p,
                                  const OffloadPlan& plan,
                                  const std::vector<double>& local_cpu,
                                  const ScenarioConfig& cfg, RicsMode mode,
                                  const SpectrumOptions& opts) {
    const RateData rd = make_rate_data(cs, p, cfg, mode);
    const OutageData od = make_outage_data(cs, p, cfg, mode);

    SpectrumResult out;
    out.alpha = alpha0;
    out.alpha.binary = false;
    out.outage_weight = opts.outage_weight0;

    // Even alpha = 0 cannot satisfy a pair below threshold: flag and fall back.
    const auto zero = SpectrumAssignment::zeros(cs.num_cvs, cs.num_pairs);
    for (int n = 0; n < cs.num_pairs; ++n) {
        if (expected_sinr_of(od, zero.alpha, n) < od.gamma_c) {
            out.infeasible_start = true;
            out.alpha = zero;
            return out;
        }
    }

    const TieWeights ties(cs.num_cvs, cs.num_pairs);
    SmoothedObjective obj;
    obj.ties = &ties;
    obj.rd = &rd;
    obj.od = &od;
    obj.rho = plan.rho;
    obj.task_bits = cfg.task_bits;
    obj.edge_delay = cfg.task_cycles() / cfg.edge_cpu;
    obj.share_bonus = opts.share_bonus;
    obj.integrality_weight = 0.5 * opts.share_bonus;
    obj.tau_local.resize(cs.num_cvs);
    for (int m = 0; m < cs.num_cvs; ++m)
        obj.tau_local[m] = (1.0 - plan.rho[m]) * cfg.task_cycles() / local_cpu[m];

    struct ScaRun {
        std::vector<std::vector<double>> alpha;
        std::vector<double> trace;
        double weight = 0.0;
        double violation = 0.0;
        double merit = 0.0;  // penalty-free true objective
    };

    // One full SCA descent from a given anchor. The tangent of q depends
    // strongly on the anchor (its slope blows up at the noise floor), so the
    // caller tries several anchors and keeps the best true objective.
    auto run_from = [&](std::vector<std::vector<double>> anchor) {
        ScaRun run;
        run.alpha = std::move(anchor);
        obj.outage_weight = opts.outage_weight0;

        auto true_value = [&](const std::vector<std::vector<double>>& a) {
            SmoothedObjective exact = obj;
            exact.use_q_hat = false;
            return exact.value(a);
        };

        double prev_true = true_value(run.alpha);
        run.trace.push_back(prev_true);
        double prev_violation = std::numeric_limits<double>::infinity();

        for (int k = 0; k < opts.sca_cap; ++k) {
            obj.q_hat.clear();
            obj.q_hat.reserve(cs.num_cvs);
            for (int m = 0; m < cs.num_cvs; ++m)
                obj.q_hat.push_back(taylor_linearize_q(m, run.alpha[m], cs, cfg));

            // Inner projected gradient descent on the convex surrogate.
            auto alpha = run.alpha;
            double current = obj.value(alpha);
            double step = 1.0;
            std::vector<std::vector<double>> grad;
            for (int it = 0; it < opts.pgd_steps; ++it) {
                obj.gradient(alpha, grad);
                bool moved = false;
                for (int bt = 0; bt < 60; ++bt) {
                    auto trial = alpha;
                    for (std::size_t m = 0; m < trial.size(); ++m) {
                        for (std::size_t n = 0; n < trial[m].size(); ++n)
                            trial[m][n] -= step * grad[m][n];
                        trial[m] = project_row_box_simplex(std::move(trial[m]));
                    }
                    const double cand = obj.value(trial);
                    if (cand < current - 1e-15 * std::max(1.0, std::fabs(current))) {
                        alpha = std::move(trial);
                        current = cand;
                        step *= 2.0;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                    if (step < 1e-16) break;
                }
                if (!moved) break;
            }

            // Accept only if the true (un-linearized) objective does not
            // worsen: the surrogate majorizes it, so this holds up to
            // numerics.
            const double cand_true = true_value(alpha);
            if (cand_true <= prev_true + 1e-12 * std::max(1.0, std::fabs(prev_true)))
                run.alpha = std::move(alpha);
            const double new_true = true_value(run.alpha);
            run.trace.push_back(new_true);

            const double rel = std::fabs(new_true - prev_true) /
                               std::max(1e-12, std::fabs(prev_true));

            // Escalate the outage penalty when violations stall; the
            // reference objective is recomputed so comparisons stay
            // weight-consistent.
            double violation = 0.0;
            for (int n = 0; n < cs.num_pairs; ++n) {
                const double g = expected_sinr_of(od, run.alpha, n);
                violation = std::max(violation,
                                     std::max(0.0, (od.gamma_c - g) / od.gamma_c));
            }
            if (violation > 1e-12 && violation > 0.9 * prev_violation) {
                obj.outage_weight = std::min(obj.outage_weight * 2.0, 1e6);
                prev_true = true_value(run.alpha);
            } else {
                prev_true = new_true;
            }
            prev_violation = violation;
            if (rel <= cfg.aioa_tol && violation <= 1e-9) break;
        }

        run.weight = obj.outage_weight;
        run.violation = 0.0;
        for (int n = 0; n < cs.num_pairs; ++n) {
            const double g = expected_sinr_of(od, run.alpha, n);
            run.violation = std::max(run.violation,
                                     std::max(0.0, (od.gamma_c - g) / od.gamma_c));
        }
        SmoothedObjective exact = obj;
        exact.use_q_hat = false;
        exact.outage_weight = 0.0;
        run.merit = exact.value(run.alpha);
        return run;
    };

    // Anchor 2: every CV serves the pair its tie weight prefers
    // (scheme-independent data only).
    auto saturated = zero.alpha;
    for (int m = 0; m < cs.num_cvs; ++m) {
        int best_n = 0;
        for (int n = 1; n < cs.num_pairs; ++n)
            if (ties.w[m][n] > ties.w[m][best_n]) best_n = n;
        saturated[m][best_n] = 1.0;
    }

    ScaRun best = run_from(out.alpha.alpha);
    ScaRun shared = run_from(saturated);
    const auto key = [](const ScaRun& r) {
        return std::make_pair(r.violation > 1e-9 ? r.violation : 0.0, r.merit);
    };
    if (key(shared) < key(best)) best = std::move(shared);

    out.alpha.alpha = best.alpha;
    out.objective_trace = best.trace;
    out.outage_weight = best.weight;
    return out;
}

SpectrumAssignment round_assignment(const SpectrumAssignment& relaxed,
                                    const ChannelSet& cs, const RicsProfile& p,
                                    const ScenarioConfig& cfg, RicsMode mode) {
    const OutageData od = make_outage_data(cs, p, cfg, mode);
    SpectrumAssignment bin = SpectrumAssignment::zeros(cs.num_cvs, cs.num_pairs, true);

    auto feasible = [&](const std::vector<std::vector<double>>& a) {
        for (int n = 0; n < cs.num_pairs; ++n)
            if (expected_sinr_of(od, a, n) < od.gamma_c) return false;
        return true;
    };

    for (int m = 0; m < cs.num_cvs; ++m) {
        int best = -1;
        double best_val = 0.5;  // only entries >= 0.5 qualify
        for (int n = 0; n < cs.num_pairs; ++n) {
            if (relaxed.alpha[m][n] >= best_val) {
                best_val = relaxed.alpha[m][n];
                best = n;
            }
        }
        if (best < 0) continue;
        bin.alpha[m][best] = 1.0;
        if (!feasible(bin.alpha)) bin.alpha[m][best] = 0.0;
    }

    // Later promotions can squeeze earlier pairs; strip the heaviest
    // contributors until every pair clears the threshold.
    while (!feasible(bin.alpha)) {
        int worst_n = -1;
        double worst_gamma = std::numeric_limits<double>::infinity();
        for (int n = 0; n < cs.num_pairs; ++n) {
            const double g = expected_sinr_of(od, bin.alpha, n);
            if (g < od.gamma_c && g < worst_gamma) {
                worst_gamma = g;
                worst_n = n;
            }
        }
        int drop_m = -1;
        double drop_coef = -1.0;
        for (int m = 0; m < cs.num_cvs; ++m) {
            if (bin.alpha[m][worst_n] == 1.0 && od.coef[m][worst_n] > drop_coef) {
                drop_coef = od.coef[m][worst_n];
                drop_m = m;
            }
        }
        if (drop_m < 0) break;  // violation not caused by sharing
        bin.alpha[drop_m][worst_n] = 0.0;
    }
    return bin;
}

}  // namespace rics
