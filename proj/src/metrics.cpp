#include "rics/metrics.hpp"

#include <cmath>

namespace rics {

CVec reflection_coeffs(const RicsProfile& p) {
    CVec v(p.size());
    for (int l = 0; l < p.size(); ++l) v[l] = p.reflection_coeff(l);
    return v;
}

CVec refraction_coeffs(const RicsProfile& p) {
    CVec v(p.size());
    for (int l = 0; l < p.size(); ++l) v[l] = p.refraction_coeff(l);
    return v;
}

double sinr_v2i(int m, const ChannelSet& cs, const RicsProfile& p,
                const SpectrumAssignment& a, const ScenarioConfig& cfg,
                RicsMode mode) {
    cplx gain = cs.h_mB[m];
    if (mode != RicsMode::off) {
        const CVec refl = reflection_coeffs(p);
        gain = cascaded_gain(cs.h_RB, refl, cs.h_mR[m], cs.h_mB[m]);
    }
    double interference = 0.0;
    const double p_t = cfg.v2v_power_watt();
    for (int n = 0; n < cs.num_pairs; ++n)
        interference += a.alpha[m][n] * p_t * std::norm(cs.h_nB[n]);
    return cfg.cv_power_watt() * std::norm(gain) / (interference + cfg.noise_watt());
}

double sinr_v2v(int n, const ChannelSet& cs, const RicsProfile& p,
                const SpectrumAssignment& a, const ScenarioConfig& cfg,
                RicsMode mode) {
    const double p_m = cfg.cv_power_watt();
    double interference = 0.0;
    CVec refr;
    CVec rn_conj;
    if (mode == RicsMode::full) {
        refr = refraction_coeffs(p);
        rn_conj.resize(cs.num_elements);
        for (int l = 0; l < cs.num_elements; ++l) rn_conj[l] = std::conj(cs.h_Rn[n][l]);
    }
    for (int m = 0; m < cs.num_cvs; ++m) {
        if (a.alpha[m][n] == 0.0) continue;
        cplx term = cs.h_mn[m][n];
        if (mode == RicsMode::full)
            term = cascaded_gain(rn_conj, refr, cs.h_mR[m], cs.h_mn[m][n]);
        interference += a.alpha[m][n] * p_m * std::norm(term);
    }
    return cfg.v2v_power_watt() * std::norm(cs.h_n[n]) /
           (interference + cfg.noise_watt());
}

double rate(double sinr_linear, double bandwidth_hz) {
    return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

DelayTriple delays(double rho, double rate_bps, double f_hz,
                   const ScenarioConfig& cfg) {
    DelayTriple d;
    const double cycles = cfg.task_cycles();
    d.local_s = (1.0 - rho) * cycles / f_hz;
    if (rho > 0.0) {
        if (rate_bps <= 0.0)
            throw ZeroRateWithOffload("delays: offloading with non-positive rate");
        d.offload_s = rho * (cfg.task_bits / rate_bps + cycles / cfg.edge_cpu);
    }
    d.total_s = std::max(d.local_s, d.offload_s);
    return d;
}

double avg_accuracy(double rho, double lambda, double a_b) {
    return (1.0 - rho) * lambda * a_b + rho * a_b;
}

double safety_coefficient(double rho, double rate_bps, double f_hz,
                          const ScenarioConfig& cfg) {
    const DelayTriple d = delays(rho, rate_bps, f_hz, cfg);
    if (d.total_s <= 0.0)
        throw DegenerateDelay("safety_coefficient: zero total delay");
    return avg_accuracy(rho, cfg.accuracy_ratio, cfg.edge_accuracy) / d.total_s;
}

double smooth_step(double x, double omega) {
    return 1.0 / (1.0 + std::exp(-omega * x));
}

double expected_v2v_sinr(int n, const ChannelSet& cs, const RicsProfile& p,
                         const SpectrumAssignment& a, const ScenarioConfig& cfg,
                         RicsMode mode) {
    const double p_m = cfg.cv_power_watt();
    const double kr = cs.kappa_Rn;
    const double km = cs.kappa_mR;
    const bool refracting = (mode == RicsMode::full);

    CVec refr;
    double t_power = 0.0;  // T = sum |s_l^t|^2
    if (refracting) {
        refr = refraction_coeffs(p);
        for (const auto& s : refr) t_power += std::norm(s);
    }

    double denom = cfg.noise_watt();
    for (int m = 0; m < cs.num_cvs; ++m) {
        if (a.alpha[m][n] == 0.0) continue;
        double expected_power = cs.pl_mn[m][n] * cs.pl_mn[m][n];
        if (refracting) {
            cplx h1 = 0.0;
            for (int l = 0; l < cs.num_elements; ++l)
                h1 += std::conj(cs.los_Rn[n][l]) * refr[l] * cs.los_mR[m][l];
            h1 *= std::sqrt(kr * km);
            const double cascade_scale = cs.pl_Rn[n] * cs.pl_mR[m];
            expected_power += cascade_scale * cascade_scale *
                              (std::norm(h1) + t_power * (kr + km + 1.0)) /
                              ((1.0 + kr) * (1.0 + km));
        }
        denom += a.alpha[m][n] * p_m * expected_power;
    }
    return cfg.v2v_power_watt() * cs.pl_n[n] * cs.pl_n[n] / denom;
}

double outage_threshold(double gamma_th, double omega, double p_outage) {
    if (p_outage <= 0.0 || p_outage >= 1.0)
        throw DomainError("outage_threshold: P_outage must be in (0,1)");
    return gamma_th + std::log(1.0 / p_outage - 1.0) / omega;
}

bool check_outage_constraint(double gamma_n, double gamma_c) {
    return gamma_n >= gamma_c;
}

SafetyReport evaluate_solution(const ChannelSet& cs, const Scenario& sc,
                               const RicsProfile& p, const OffloadPlan& plan,
                               const SpectrumAssignment& a,
                               const ScenarioConfig& cfg, RicsMode mode) {
    SafetyReport rep;
    rep.rows.reserve(cs.num_cvs);
    for (int m = 0; m < cs.num_cvs; ++m) {
        SafetyRow row;
        row.cv = m;
        row.rho = plan.rho[m];
        row.rate_bps = rate(sinr_v2i(m, cs, p, a, cfg, mode), cfg.bandwidth);
        const DelayTriple d = delays(row.rho, row.rate_bps, sc.local_cpu[m], cfg);
        row.tau_local_s = d.local_s;
        row.tau_offload_s = d.offload_s;
        row.tau_s = d.total_s;
        row.accuracy = avg_accuracy(row.rho, cfg.accuracy_ratio, cfg.edge_accuracy);
        row.safety = row.accuracy / d.total_s;
        rep.sum_safety += row.safety;
        rep.rows.push_back(row);
    }
    rep.mean_safety = rep.sum_safety / cs.num_cvs;
    for (int n = 0; n < cs.num_pairs; ++n)
        rep.sum_v2v_rate_bps += rate(sinr_v2v(n, cs, p, a, cfg, mode), cfg.bandwidth);
    return rep;
}

}  // namespace rics
