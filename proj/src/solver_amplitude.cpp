#include "rics/solver_amplitude.hpp"

#include <algorithm>
#include <cmath>

namespace rics {

namespace {

struct Residuals {
    // residual r_p(psi) = base_p + sum_i psi_i * coef_p[i]
    std::vector<cplx> base;
    std::vector<CVec> coef;
};

Residuals collect_residuals(const ChannelSet& cs, const SpectrumAssignment& a,
                            const RicsProfile& p) {
    Residuals res;
    const int len = cs.num_elements;
    for (int m = 0; m < cs.num_cvs; ++m) {
        for (int n = 0; n < cs.num_pairs; ++n) {
            if (a.alpha[m][n] < 0.5) continue;
            res.base.push_back(cs.h_mn[m][n]);
            CVec c(len);
            for (int l = 0; l < len; ++l) {
                const cplx phase = std::polar(std::sqrt(p.beta_t[l]), p.theta_t[l]);
                c[l] = phase * std::conj(cs.h_Rn[n][l]) * cs.h_mR[m][l];
            }
            res.coef.push_back(std::move(c));
        }
    }
    return res;
}

double objective_of(const Residuals& res, const std::vector<double>& psi) {
    double sum = 0.0;
    for (std::size_t pidx = 0; pidx < res.base.size(); ++pidx) {
        cplx r = res.base[pidx];
        for (std::size_t i = 0; i < psi.size(); ++i)
            r += psi[i] * res.coef[pidx][i];
        sum += std::norm(r);
    }
    return sum;
}

std::vector<double> gradient_of(const Residuals& res,
                                const std::vector<double>& psi) {
    std::vector<double> g(psi.size(), 0.0);
    for (std::size_t pidx = 0; pidx < res.base.size(); ++pidx) {
        cplx r = res.base[pidx];
        for (std::size_t i = 0; i < psi.size(); ++i)
            r += psi[i] * res.coef[pidx][i];
        for (std::size_t i = 0; i < psi.size(); ++i)
            g[i] += 2.0 * (std::conj(res.coef[pidx][i]) * r).real();
    }
    return g;
}

std::vector<double> project(std::vector<double> psi, double lo, double hi) {
    for (double& v : psi) v = std::clamp(v, lo, hi);
    return psi;
}

}  // namespace

double ls_objective(const std::vector<double>& psi, const ChannelSet& cs,
                    const SpectrumAssignment& a, const RicsProfile& p,
                    const ScenarioConfig&) {
    return objective_of(collect_residuals(cs, a, p), psi);
}

std::vector<double> ls_gradient(const std::vector<double>& psi,
                                const ChannelSet& cs,
                                const SpectrumAssignment& a,
                                const RicsProfile& p, const ScenarioConfig&) {
    return gradient_of(collect_residuals(cs, a, p), psi);
}

AmplitudeResult solve_amplitude_gd(const ChannelSet& cs,
                                   const SpectrumAssignment& a,
                                   const RicsProfile& p,
                                   const ScenarioConfig& cfg,
                                   const AmplitudeOptions& opts) {
    const Residuals res = collect_residuals(cs, a, p);
    const int len = cs.num_elements;

    AmplitudeResult out;
    out.psi.assign(len, 1.0);
    out.psi = project(out.psi, opts.psi_lo, opts.psi_hi);
    out.psi_trace.push_back(out.psi);

    double f = objective_of(res, out.psi);
    out.objective_trace.push_back(f);
    if (res.base.empty()) return out;  // no sharing pairs: nothing to adjust

    constexpr double kArmijo = 1e-4;
    double step = cfg.gd_rate;
    out.hit_iteration_cap = true;
    for (int it = 0; it < opts.iteration_cap; ++it) {
        const std::vector<double> grad = gradient_of(res, out.psi);

        // Projected-gradient mapping at the trial step, used both for the
        // stop rule and as the descent direction.
        auto mapping = [&](double s) {
            std::vector<double> trial(out.psi.size());
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial[i] = out.psi[i] - s * grad[i];
            return project(std::move(trial), opts.psi_lo, opts.psi_hi);
        };

        double map_norm = 0.0;
        {
            const auto probe = mapping(step);
            for (std::size_t i = 0; i < probe.size(); ++i) {
                const double g = (out.psi[i] - probe[i]) / step;
                map_norm += g * g;
            }
            map_norm = std::sqrt(map_norm);
        }
        out.grad_norm = map_norm;
        if (map_norm < cfg.gd_tol) {
            out.hit_iteration_cap = false;
            break;
        }

        // Backtracking with halving on the projected point.
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const auto trial = mapping(step);
            double decrease_needed = 0.0;
            for (std::size_t i = 0; i < trial.size(); ++i) {
                const double d = out.psi[i] - trial[i];
                decrease_needed += d * d;
            }
            const double f_trial = objective_of(res, trial);
            if (f_trial <= f - kArmijo / step * decrease_needed) {
                out.psi = trial;
                f = f_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            out.hit_iteration_cap = false;   // stalled at numerical precision
            break;
        }
        out.objective_trace.push_back(f);
        out.psi_trace.push_back(out.psi);
        step = std::min(step * 2.0, 1e6);    // re-inflate for the next round
    }
    return out;
}

}  // namespace rics
