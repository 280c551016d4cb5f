#include "rics/solver_phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rics/metrics.hpp"

namespace rics {

CVec build_effective_channel(const CVec& h_out, const CVec& h_in) {
    if (h_out.size() != h_in.size())
        throw LengthMismatch("build_effective_channel: lengths differ");
    CVec out(h_out.size());
    for (std::size_t l = 0; l < h_out.size(); ++l) out[l] = h_out[l] * h_in[l];
    return out;
}

PhaseBranches coupled_phase_update(cplx u_t, cplx u_r) {
    PhaseBranches br;
    const cplx c_quarter = std::conj(u_t) + cplx(0.0, 1.0) * std::conj(u_r);
    const cplx c_three = std::conj(u_t) - cplx(0.0, 1.0) * std::conj(u_r);
    br.theta_t_quarter = c_quarter == cplx(0.0, 0.0) ? 0.0 : -std::arg(c_quarter);
    br.objective_quarter = std::abs(c_quarter);
    br.theta_t_three_quarter = c_three == cplx(0.0, 0.0) ? 0.0 : -std::arg(c_three);
    br.objective_three_quarter = std::abs(c_three);
    return br;
}

std::pair<double, double> coupled_amplitude_update(double a, double b) {
    const double norm = std::sqrt(a * a + b * b);
    if (norm == 0.0) return {std::sqrt(0.5), std::sqrt(0.5)};
    if (a >= 0.0 && b >= 0.0) return {a / norm, b / norm};
    if (a >= 0.0) return {1.0, 0.0};
    if (b >= 0.0) return {0.0, 1.0};
    // Both negative: best boundary candidate (the paper's (0,0) would break
    // the unit energy split).
    return (a > b) ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
}

PhaseWorkspace::PhaseWorkspace(const ChannelSet& cs, const SpectrumAssignment& a,
                               const ScenarioConfig& cfg,
                               const std::vector<double>& psi,
                               const PhaseOptions& opts)
    : len_(cs.num_elements),
      reflect_only_(opts.reflect_only),
      soft_weight_(opts.v2v_soft_weight),
      noise_w_(cfg.noise_watt()),
      p_m_w_(cfg.cv_power_watt()),
      psi_(psi) {
    const double p_t = cfg.v2v_power_watt();
    direct_.resize(cs.num_cvs);
    cascade_.resize(cs.num_cvs);
    interference_.resize(cs.num_cvs);
    weight_.assign(cs.num_cvs, 1.0);
    if (static_cast<int>(opts.rate_weights.size()) == cs.num_cvs)
        weight_ = opts.rate_weights;
    for (int m = 0; m < cs.num_cvs; ++m) {
        direct_[m] = cs.h_mB[m];
        cascade_[m] = build_effective_channel(cs.h_RB, cs.h_mR[m]);
        double i_m = noise_w_;
        for (int n = 0; n < cs.num_pairs; ++n)
            i_m += a.alpha[m][n] * p_t * std::norm(cs.h_nB[n]);
        interference_[m] = i_m;
    }

    if (reflect_only_) return;  // refraction path absent: no outage coupling

    const double gamma_c =
        outage_threshold(cfg.sinr_threshold, cfg.smooth_param, cfg.outage_cap);
    for (int n = 0; n < cs.num_pairs; ++n) {
        PairBlock blk;
        blk.rhs = p_t * std::norm(cs.h_n[n]) / gamma_c;
        for (int m = 0; m < cs.num_cvs; ++m) {
            if (a.alpha[m][n] == 0.0) continue;
            blk.weight.push_back(a.alpha[m][n] * p_m_w_);
            blk.direct.push_back(cs.h_mn[m][n]);
            CVec c(len_);
            for (int l = 0; l < len_; ++l)
                c[l] = std::conj(cs.h_Rn[n][l]) * cs.h_mR[m][l];
            blk.cascade.push_back(std::move(c));
        }
        if (!blk.weight.empty()) pairs_.push_back(std::move(blk));
    }
}

double PhaseWorkspace::sum_rate(const CVec& v_r) const {
    double sum = 0.0;
    for (std::size_t m = 0; m < direct_.size(); ++m) {
        cplx z = direct_[m];
        for (int l = 0; l < len_; ++l) z += v_r[l] * cascade_[m][l];
        sum += weight_[m] * std::log2(1.0 + p_m_w_ * std::norm(z) / interference_[m]);
    }
    return sum;
}

double PhaseWorkspace::outage_penalty(const CVec& v_t) const {
    double pen = 0.0;
    for (const auto& blk : pairs_) {
        double lhs = noise_w_;
        for (std::size_t k = 0; k < blk.weight.size(); ++k) {
            cplx z = blk.direct[k];
            for (int l = 0; l < len_; ++l)
                z += v_t[l] * psi_[l] * blk.cascade[k][l];
            lhs += blk.weight[k] * std::norm(z);
        }
        const double violation = std::max(0.0, lhs / blk.rhs - 1.0);
        pen += violation * violation;
    }
    return pen;
}

double PhaseWorkspace::interference_load(const CVec& v_t) const {
    double load = 0.0;
    for (const auto& blk : pairs_) {
        double lhs = noise_w_;
        for (std::size_t k = 0; k < blk.weight.size(); ++k) {
            cplx z = blk.direct[k];
            for (int l = 0; l < len_; ++l) z += v_t[l] * blk.cascade[k][l];
            lhs += blk.weight[k] * std::norm(z);
        }
        load += lhs / blk.rhs;
    }
    return load;
}

double PhaseWorkspace::lift_distance_sq(const CVec& v, const CVec& v_tilde) {
    double nv = 0.0, nt = 0.0;
    cplx inner = 0.0;
    for (std::size_t l = 0; l < v.size(); ++l) {
        nv += std::norm(v[l]);
        nt += std::norm(v_tilde[l]);
        inner += std::conj(v_tilde[l]) * v[l];
    }
    return std::max(0.0, nt * nt - 2.0 * std::norm(inner) + nv * nv);
}

double PhaseWorkspace::objective(const CVec& v_t, const CVec& v_r,
                                 const CVec& vt_tilde, const CVec& vr_tilde,
                                 double eta, double outage_weight) const {
    double theta = sum_rate(v_r) -
                   lift_distance_sq(v_r, vr_tilde) / (2.0 * eta);
    if (!reflect_only_) {
        theta -= lift_distance_sq(v_t, vt_tilde) / (2.0 * eta);
        theta -= outage_weight * outage_penalty(v_t);
        theta -= soft_weight_ * interference_load(v_t);
    }
    return theta;
}

void PhaseWorkspace::gradient(const CVec& v_t, const CVec& v_r,
                              const CVec& vt_tilde, const CVec& vr_tilde,
                              double eta, double outage_weight, CVec& grad_t,
                              CVec& grad_r) const {
    grad_t.assign(len_, 0.0);
    grad_r.assign(len_, 0.0);

    // Rate term, d/d conj(v_r).
    for (std::size_t m = 0; m < direct_.size(); ++m) {
        cplx z = direct_[m];
        for (int l = 0; l < len_; ++l) z += v_r[l] * cascade_[m][l];
        const double c = weight_[m] * p_m_w_ /
                         ((interference_[m] + p_m_w_ * std::norm(z)) * std::log(2.0));
        for (int l = 0; l < len_; ++l)
            grad_r[l] += c * z * std::conj(cascade_[m][l]);
    }

    // Lift penalty: d/d conj(v) of ||v~v~^H - vv^H||^2 is
    // 2(||v||^2 v - (v~^H v) v~); subtracted and scaled by 1/(2 eta).
    auto add_lift = [&](const CVec& v, const CVec& vt, CVec& g) {
        double nv = 0.0;
        cplx inner = 0.0;
        for (int l = 0; l < len_; ++l) {
            nv += std::norm(v[l]);
            inner += std::conj(vt[l]) * v[l];
        }
        for (int l = 0; l < len_; ++l)
            g[l] -= (nv * v[l] - inner * vt[l]) / eta;
    };
    add_lift(v_r, vr_tilde, grad_r);

    if (reflect_only_) return;
    add_lift(v_t, vt_tilde, grad_t);

    // Outage hinge (psi-aware) plus the weak always-on load term
    // (psi-blind), d/d conj(v_t).
    for (const auto& blk : pairs_) {
        double lhs = noise_w_;
        std::vector<cplx> res_psi(blk.weight.size());
        std::vector<cplx> res_unit(blk.weight.size());
        for (std::size_t k = 0; k < blk.weight.size(); ++k) {
            cplx zp = blk.direct[k];
            cplx zu = blk.direct[k];
            for (int l = 0; l < len_; ++l) {
                zp += v_t[l] * psi_[l] * blk.cascade[k][l];
                zu += v_t[l] * blk.cascade[k][l];
            }
            res_psi[k] = zp;
            res_unit[k] = zu;
            lhs += blk.weight[k] * std::norm(zp);
        }
        const double violation = std::max(0.0, lhs / blk.rhs - 1.0);
        const double hinge_scale = outage_weight * 2.0 * violation / blk.rhs;
        const double soft_scale = soft_weight_ / blk.rhs;
        for (std::size_t k = 0; k < blk.weight.size(); ++k) {
            for (int l = 0; l < len_; ++l) {
                if (hinge_scale > 0.0)
                    grad_t[l] -= hinge_scale * blk.weight[k] * res_psi[k] *
                                 std::conj(psi_[l] * blk.cascade[k][l]);
                grad_t[l] -= soft_scale * blk.weight[k] * res_unit[k] *
                             std::conj(blk.cascade[k][l]);
            }
        }
    }
}

std::vector<double> PhaseWorkspace::ascend(CVec& v_t, CVec& v_r,
                                           const CVec& vt_tilde,
                                           const CVec& vr_tilde, double eta,
                                           double outage_weight,
                                           int steps) const {
    std::vector<double> accepted;
    double step = 0.5;  // absolute move length; scale-free via normalization
    double current = objective(v_t, v_r, vt_tilde, vr_tilde, eta, outage_weight);
    CVec grad_t, grad_r;
    for (int s = 0; s < steps; ++s) {
        gradient(v_t, v_r, vt_tilde, vr_tilde, eta, outage_weight, grad_t, grad_r);
        double gnorm = 0.0;
        for (int l = 0; l < len_; ++l)
            gnorm += std::norm(grad_t[l]) + std::norm(grad_r[l]);
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-30) break;

        bool moved = false;
        for (int bt = 0; bt < 80; ++bt) {
            const double scale = step / gnorm;
            CVec trial_t(len_), trial_r(len_);
            for (int l = 0; l < len_; ++l) {
                trial_t[l] = v_t[l] + scale * grad_t[l];
                trial_r[l] = v_r[l] + scale * grad_r[l];
            }
            const double cand =
                objective(trial_t, trial_r, vt_tilde, vr_tilde, eta, outage_weight);
            if (cand > current) {
                v_t = std::move(trial_t);
                v_r = std::move(trial_r);
                current = cand;
                accepted.push_back(cand);
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
            if (step < 1e-14) break;
        }
        if (!moved) break;
    }
    return accepted;
}

void PhaseWorkspace::coordinate_polish(std::vector<double>& theta_t,
                                       std::vector<double>& offset,
                                       std::vector<double>& sqrt_bt,
                                       std::vector<double>& sqrt_br,
                                       double hinge_weight, int sweeps) const {
    auto refl = [&](int l) { return std::polar(sqrt_br[l], theta_t[l] + offset[l]); };
    auto refr = [&](int l) { return std::polar(sqrt_bt[l], theta_t[l]); };

    // Cached linear states: V2I numerator gains and both V2V residual sets
    // (psi-scaled for the hinge, unit-amplitude for the soft load).
    std::vector<cplx> z(direct_);
    for (std::size_t m = 0; m < z.size(); ++m)
        for (int l = 0; l < len_; ++l) z[m] += refl(l) * cascade_[m][l];
    std::vector<std::vector<cplx>> res_psi(pairs_.size());
    std::vector<std::vector<cplx>> res_unit(pairs_.size());
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
        res_psi[p] = pairs_[p].direct;
        res_unit[p] = pairs_[p].direct;
        for (std::size_t k = 0; k < res_psi[p].size(); ++k)
            for (int l = 0; l < len_; ++l) {
                res_psi[p][k] += refr(l) * psi_[l] * pairs_[p].cascade[k][l];
                res_unit[p][k] += refr(l) * pairs_[p].cascade[k][l];
            }
    }

    auto merit = [&](const std::vector<cplx>& zs,
                     const std::vector<std::vector<cplx>>& rp,
                     const std::vector<std::vector<cplx>>& ru) {
        double v = 0.0;
        for (std::size_t m = 0; m < zs.size(); ++m)
            v += weight_[m] *
                 std::log2(1.0 + p_m_w_ * std::norm(zs[m]) / interference_[m]);
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
            double lhs_psi = noise_w_, lhs_unit = noise_w_;
            for (std::size_t k = 0; k < rp[p].size(); ++k) {
                lhs_psi += pairs_[p].weight[k] * std::norm(rp[p][k]);
                lhs_unit += pairs_[p].weight[k] * std::norm(ru[p][k]);
            }
            v -= soft_weight_ * lhs_unit / pairs_[p].rhs;
            const double viol = std::max(0.0, lhs_psi / pairs_[p].rhs - 1.0);
            v -= hinge_weight * viol * viol;
        }
        return v;
    };

    double current = merit(z, res_psi, res_unit);
    std::vector<cplx> z_cand;
    std::vector<std::vector<cplx>> rp_cand, ru_cand;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool moved = false;
        for (int l = 0; l < len_; ++l) {
            const cplx old_refl = refl(l);
            const cplx old_refr = refr(l);

            double best = current;
            double best_theta = theta_t[l], best_off = offset[l];
            double best_sbt = sqrt_bt[l], best_sbr = sqrt_br[l];
            bool improved = false;

            for (double off : {kPi / 2.0, 1.5 * kPi}) {
                for (int ti = -1; ti < 16; ++ti) {
                    // ti = -1 keeps the current phase as a candidate
                    const double theta =
                        ti < 0 ? theta_t[l] : 2.0 * kPi * ti / 16.0;
                    for (double bt : {-1.0, 0.0, 0.25, 0.5, 0.75, 1.0}) {
                        double sbt, sbr;
                        if (bt < 0.0) {
                            sbt = sqrt_bt[l];
                            sbr = sqrt_br[l];
                        } else {
                            sbt = std::sqrt(bt);
                            sbr = std::sqrt(1.0 - bt);
                        }
                        const cplx new_refl = std::polar(sbr, theta + off);
                        const cplx new_refr = std::polar(sbt, theta);
                        z_cand = z;
                        for (std::size_t m = 0; m < z_cand.size(); ++m)
                            z_cand[m] += (new_refl - old_refl) * cascade_[m][l];
                        rp_cand = res_psi;
                        ru_cand = res_unit;
                        for (std::size_t p = 0; p < rp_cand.size(); ++p)
                            for (std::size_t k = 0; k < rp_cand[p].size(); ++k) {
                                rp_cand[p][k] += (new_refr - old_refr) * psi_[l] *
                                                 pairs_[p].cascade[k][l];
                                ru_cand[p][k] +=
                                    (new_refr - old_refr) * pairs_[p].cascade[k][l];
                            }
                        const double cand = merit(z_cand, rp_cand, ru_cand);
                        if (cand > best + 1e-12) {
                            best = cand;
                            best_theta = theta;
                            best_off = off;
                            best_sbt = sbt;
                            best_sbr = sbr;
                            improved = true;
                        }
                    }
                }
            }
            if (improved) {
                const cplx new_refl = std::polar(best_sbr, best_theta + best_off);
                const cplx new_refr = std::polar(best_sbt, best_theta);
                for (std::size_t m = 0; m < z.size(); ++m)
                    z[m] += (new_refl - old_refl) * cascade_[m][l];
                for (std::size_t p = 0; p < res_psi.size(); ++p)
                    for (std::size_t k = 0; k < res_psi[p].size(); ++k) {
                        res_psi[p][k] +=
                            (new_refr - old_refr) * psi_[l] * pairs_[p].cascade[k][l];
                        res_unit[p][k] +=
                            (new_refr - old_refr) * pairs_[p].cascade[k][l];
                    }
                theta_t[l] = best_theta;
                offset[l] = best_off;
                sqrt_bt[l] = best_sbt;
                sqrt_br[l] = best_sbr;
                current = best;
                moved = true;
            }
        }
        if (!moved) break;
    }
}

namespace {

struct TildeState {
    std::vector<double> theta_t;
    std::vector<double> offset;   // pi/2 or 3pi/2 per element
    std::vector<double> sqrt_bt;  // sqrt(beta_t)
    std::vector<double> sqrt_br;  // sqrt(beta_r)

    CVec vt() const {
        CVec v(theta_t.size());
        for (std::size_t l = 0; l < v.size(); ++l)
            v[l] = std::polar(sqrt_bt[l], theta_t[l]);
        return v;
    }
    CVec vr() const {
        CVec v(theta_t.size());
        for (std::size_t l = 0; l < v.size(); ++l)
            v[l] = std::polar(sqrt_br[l], theta_t[l] + offset[l]);
        return v;
    }
};

TildeState tilde_from_profile(const RicsProfile& p) {
    TildeState st;
    const int len = p.size();
    st.theta_t.resize(len);
    st.offset.resize(len);
    st.sqrt_bt.resize(len);
    st.sqrt_br.resize(len);
    for (int l = 0; l < len; ++l) {
        st.theta_t[l] = p.theta_t[l];
        const double diff = wrap_angle(p.theta_r[l] - p.theta_t[l]);
        st.offset[l] = (std::fabs(diff - kPi / 2.0) < std::fabs(diff - 1.5 * kPi))
                           ? kPi / 2.0
                           : 1.5 * kPi;
        st.sqrt_bt[l] = std::sqrt(p.beta_t[l]);
        st.sqrt_br[l] = std::sqrt(p.beta_r[l]);
    }
    return st;
}

RicsProfile profile_from_tilde(const TildeState& st, const std::vector<double>& psi) {
    RicsProfile p;
    const int len = static_cast<int>(st.theta_t.size());
    p.theta_t.resize(len);
    p.theta_r.resize(len);
    p.beta_t.resize(len);
    p.beta_r.resize(len);
    p.psi = psi;
    for (int l = 0; l < len; ++l) {
        p.theta_t[l] = wrap_angle(st.theta_t[l]);
        p.theta_r[l] = wrap_angle(st.theta_t[l] + st.offset[l]);
        p.beta_t[l] = st.sqrt_bt[l] * st.sqrt_bt[l];
        p.beta_r[l] = 1.0 - p.beta_t[l];  // exact energy split
    }
    return p;
}

/// One sweep of the per-element closed forms: phases (both branches, pick
/// the larger surrogate) then amplitudes given phases.
void per_element_update(const CVec& v_t, const CVec& v_r, bool reflect_only,
                        TildeState& st) {
    const int len = static_cast<int>(st.theta_t.size());
    for (int l = 0; l < len; ++l) {
        if (reflect_only) {
            st.sqrt_bt[l] = 0.0;
            st.sqrt_br[l] = 1.0;
            // Only the reflection inner product matters; align theta_r with
            // v_r and keep the coupled theta_t bookkeeping.
            if (v_r[l] != cplx(0.0, 0.0)) {
                st.offset[l] = kPi / 2.0;
                st.theta_t[l] = std::arg(v_r[l]) - st.offset[l];
            }
            continue;
        }
        const cplx u_t = v_t[l] * st.sqrt_bt[l];
        const cplx u_r = v_r[l] * st.sqrt_br[l];
        if (u_t == cplx(0.0, 0.0) && u_r == cplx(0.0, 0.0)) {
            // Amplitudes still update below from the raw beamformers.
        } else {
            const PhaseBranches br = coupled_phase_update(u_t, u_r);
            if (br.objective_quarter >= br.objective_three_quarter) {
                st.theta_t[l] = br.theta_t_quarter;
                st.offset[l] = kPi / 2.0;
            } else {
                st.theta_t[l] = br.theta_t_three_quarter;
                st.offset[l] = 1.5 * kPi;
            }
        }
        const double a =
            (std::conj(v_t[l]) * std::polar(1.0, st.theta_t[l])).real();
        const double b =
            (std::conj(v_r[l]) * std::polar(1.0, st.theta_t[l] + st.offset[l]))
                .real();
        const auto [sbt, sbr] = coupled_amplitude_update(a, b);
        st.sqrt_bt[l] = sbt;
        st.sqrt_br[l] = sbr;
    }
}

}  // namespace

PhaseResult solve_phases(const ChannelSet& cs, const SpectrumAssignment& a,
                         const ScenarioConfig& cfg, const RicsProfile& init,
                         const PhaseOptions& opts) {
    PhaseWorkspace ws(cs, a, cfg, init.psi, opts);
    const int len = cs.num_elements;

    RicsProfile base = init;
    if (opts.reflect_only) {
        for (int l = 0; l < len; ++l) {
            base.beta_t[l] = 0.0;
            base.beta_r[l] = 1.0;
        }
    }

    TildeState tilde = tilde_from_profile(base);

    // Warm starts: phase-align the reflection to the heaviest CVs (and to a
    // weight-blended superposition); keep whichever start the solver's own
    // merit prefers. The coupled theta_t rides along at +pi/2.
    {
        auto tilde_score0 = [&](const TildeState& ts) {
            const double viol =
                ws.has_refraction() ? ws.outage_penalty(ts.vt()) : 0.0;
            const double load =
                ws.has_refraction() ? ws.interference_load(ts.vt()) : 0.0;
            return std::make_pair(
                viol, -(ws.sum_rate(ts.vr()) - opts.v2v_soft_weight * load));
        };
        auto best0 = tilde_score0(tilde);
        std::vector<int> order(ws.num_cvs());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return ws.rate_weight(a) > ws.rate_weight(b);
        });
        const int tries = std::min(3, ws.num_cvs());
        for (int t = 0; t <= tries; ++t) {
            TildeState cand = tilde;
            for (int l = 0; l < len; ++l) {
                cplx blend = 0.0;
                if (t < tries) {
                    const int m = order[t];
                    blend = std::polar(1.0, std::arg(ws.direct_gain(m)) -
                                                std::arg(ws.cascade_gain(m)[l]));
                } else {
                    for (int m = 0; m < ws.num_cvs(); ++m)
                        blend += ws.rate_weight(m) *
                                 std::polar(1.0, std::arg(ws.direct_gain(m)) -
                                                     std::arg(ws.cascade_gain(m)[l]));
                    if (blend == cplx(0.0, 0.0)) blend = 1.0;
                }
                const double theta_r = std::arg(blend);
                cand.offset[l] = kPi / 2.0;
                cand.theta_t[l] = theta_r - cand.offset[l];
            }
            const auto sc0 = tilde_score0(cand);
            if (sc0 < best0) {
                best0 = sc0;
                tilde = cand;
            }
        }
    }

    CVec v_t = tilde.vt();
    CVec v_r = tilde.vr();

    PhaseResult out;
    double eta = opts.eta0;
    double weight = opts.outage_weight0;

    // True merit of a coupled candidate: outage violation first, then rate.
    auto tilde_score = [&](const TildeState& ts) {
        const double viol = ws.has_refraction() ? ws.outage_penalty(ts.vt()) : 0.0;
        const double load =
            ws.has_refraction() ? ws.interference_load(ts.vt()) : 0.0;
        return std::make_pair(viol,
                              -(ws.sum_rate(ts.vr()) - opts.v2v_soft_weight * load));
    };

    TildeState best = tilde;
    auto best_score = tilde_score(best);
    if (!opts.reflect_only) {
        // Boundary candidate: all energy refracted, reflection silent.
        TildeState dark = tilde;
        for (int l = 0; l < len; ++l) {
            dark.sqrt_bt[l] = 1.0;
            dark.sqrt_br[l] = 0.0;
        }
        const auto dark_score = tilde_score(dark);
        if (dark_score < best_score) {
            best = dark;
            best_score = dark_score;
        }
    }
    double prev_violation = std::numeric_limits<double>::infinity();
    out.round_cap_hit = true;
    for (int round = 0; round < opts.round_cap; ++round) {
        const CVec vt_t = tilde.vt();
        const CVec vr_t = tilde.vr();
        auto accepted = ws.ascend(v_t, v_r, vt_t, vr_t, eta, weight,
                                  opts.ascent_steps);
        out.objective_trace.insert(out.objective_trace.end(), accepted.begin(),
                                   accepted.end());

        per_element_update(v_t, v_r, opts.reflect_only, tilde);

        const auto score_now = tilde_score(tilde);
        const bool improved = score_now < best_score;
        if (improved) {
            best = tilde;
            best_score = score_now;
        }

        out.residual = std::sqrt(
            PhaseWorkspace::lift_distance_sq(v_t, tilde.vt()) +
            PhaseWorkspace::lift_distance_sq(v_r, tilde.vr()));
        if (out.residual <= opts.residual_tol) {
            out.round_cap_hit = false;
            break;
        }

        if (ws.has_refraction()) {
            const double violation = ws.outage_penalty(tilde.vt());
            if (violation > 1e-12 && violation > 0.9 * prev_violation)
                weight = std::min(weight * 2.0, 1e6);
            prev_violation = violation;
        }
        // Keep the tether loose while rounds still pay off; tighten to force
        // v -> v~ consensus once they stall (always in the tail half of the
        // round budget).
        if (!improved || 2 * round >= opts.round_cap)
            eta = std::max(eta * 0.5, opts.eta_min);
    }

    // Greedy per-element refinement of the best coupled candidate against
    // the true merit (catches the last fraction the penalty loop leaves).
    ws.coordinate_polish(best.theta_t, best.offset, best.sqrt_bt, best.sqrt_br,
                         weight, 3);

    out.profile = profile_from_tilde(best, init.psi);

    // Monotonicity safeguard: never hand back something worse than the
    // initial profile (outage violation first, then sum rate).
    auto score = [&](const RicsProfile& p) {
        TildeState ts = tilde_from_profile(p);
        const double viol = ws.has_refraction() ? ws.outage_penalty(ts.vt()) : 0.0;
        return std::make_pair(viol, -ws.sum_rate(ts.vr()));
    };
    if (score(out.profile) > score(base)) {
        out.profile = base;
        out.kept_initial = true;
    }
    return out;
}

}  // namespace rics
