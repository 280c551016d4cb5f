#pragma once

#include <utility>
#include <vector>

#include "rics/channel.hpp"
#include "rics/config.hpp"
#include "rics/profile.hpp"

namespace rics {

/// Element-wise product h_RB o h_mR (the lifted effective cascade channel).
CVec build_effective_channel(const CVec& h_out, const CVec& h_in);

/// Both coupling-branch candidates for one element's refraction phase, with
/// the surrogate objective value each attains. u_x(l) are the
/// amplitude-scaled beamformer entries v_x(l)*sqrt(beta_x,l).
struct PhaseBranches {
    double theta_t_quarter = 0.0;       // branch theta_r = theta_t + pi/2
    double objective_quarter = 0.0;
    double theta_t_three_quarter = 0.0; // branch theta_r = theta_t + 3pi/2
    double objective_three_quarter = 0.0;
};
PhaseBranches coupled_phase_update(cplx u_t, cplx u_r);

/// Closed-form energy split maximizing a*sqrt(beta_t) + b*sqrt(beta_r) under
/// beta_t + beta_r = 1; returns (sqrt(beta_t), sqrt(beta_r)). Negative a and
/// b fall back to the best boundary candidate (never (0,0)).
std::pair<double, double> coupled_amplitude_update(double a, double b);

struct PhaseOptions {
    double eta0 = 1.0;           // initial penalty scale, halved per round
    double eta_min = 1e-12;
    int round_cap = 120;
    int ascent_steps = 40;       // beamformer steps per round
    double residual_tol = 1e-6;  // on ||v~ v~^H - v v^H||_F
    bool reflect_only = false;   // pin beta = (1, 0): conventional RIS
    double outage_weight0 = 0.01;
    /// Weak always-on weight on the normalized V2V interference load. The
    /// hinge alone abandons the refraction path whenever constraints are
    /// slack; this keeps it live so amplitude adjustment has something to
    /// work with.
    double v2v_soft_weight = 3.0;
    /// Optional per-CV weights on the rate terms (empty = uniform). The
    /// alternating loop passes each CV's safety sensitivity to its uplink
    /// rate so the common profile is steered where it actually pays.
    std::vector<double> rate_weights;
};

struct PhaseResult {
    RicsProfile profile;
    std::vector<double> objective_trace;  // theta over accepted ascent steps
    double residual = 0.0;
    bool round_cap_hit = false;
    bool kept_initial = false;  // candidate was worse; initial profile returned
};

/// Precomputed surrogate problem for one (channels, alpha) instance. Exposed
/// so gradients can be finite-difference checked directly.
class PhaseWorkspace {
  public:
    PhaseWorkspace(const ChannelSet& cs, const SpectrumAssignment& a,
                   const ScenarioConfig& cfg, const std::vector<double>& psi,
                   const PhaseOptions& opts);

    int num_elements() const { return len_; }
    int num_cvs() const { return static_cast<int>(direct_.size()); }
    bool has_refraction() const { return !reflect_only_; }
    cplx direct_gain(int m) const { return direct_[m]; }
    const CVec& cascade_gain(int m) const { return cascade_[m]; }
    double rate_weight(int m) const { return weight_[m]; }

    /// Sum V2I spectral efficiency for reflection beamformer v_r.
    double sum_rate(const CVec& v_r) const;
    /// Normalized outage hinge penalty (refraction side), 0 when inactive.
    double outage_penalty(const CVec& v_t) const;
    /// Normalized interference load sum_n A_n/B_n (refraction side).
    double interference_load(const CVec& v_t) const;
    /// Frobenius distance^2 between the rank-one lifts of v and v_tilde.
    static double lift_distance_sq(const CVec& v, const CVec& v_tilde);

    /// Full surrogate theta = sum_rate - lift penalties/(2 eta) -
    /// outage_weight * outage_penalty.
    double objective(const CVec& v_t, const CVec& v_r, const CVec& vt_tilde,
                     const CVec& vr_tilde, double eta, double outage_weight) const;

    /// Wirtinger gradients (d/d conj(v)) of the surrogate.
    void gradient(const CVec& v_t, const CVec& v_r, const CVec& vt_tilde,
                  const CVec& vr_tilde, double eta, double outage_weight,
                  CVec& grad_t, CVec& grad_r) const;

    /// Monotone backtracking ascent steps on (v_t, v_r); returns accepted
    /// objective values.
    std::vector<double> ascend(CVec& v_t, CVec& v_r, const CVec& vt_tilde,
                               const CVec& vr_tilde, double eta,
                               double outage_weight, int steps) const;

    /// Greedy per-element coordinate improvement of a coupled profile
    /// (theta_t, branch offset, energy split) against the true merit
    /// weighted-rate - soft*load - hinge_weight*violations. Incremental,
    /// a few candidate (theta, beta, branch) triples per element.
    void coordinate_polish(std::vector<double>& theta_t,
                           std::vector<double>& offset,
                           std::vector<double>& sqrt_bt,
                           std::vector<double>& sqrt_br, double hinge_weight,
                           int sweeps) const;

  private:
    int len_ = 0;
    bool reflect_only_ = false;
    double soft_weight_ = 0.0;
    double noise_w_ = 0.0;
    std::vector<cplx> direct_;               // h_mB per CV
    std::vector<CVec> cascade_;              // h_RB o h_mR per CV
    std::vector<double> interference_;       // alpha-weighted V2I denominator
    std::vector<double> weight_;             // per-CV rate weights
    double p_m_w_ = 0.0;
    // Outage constraint data per active pair.
    struct PairBlock {
        double rhs = 0.0;                    // P_t |h_n|^2 / gamma_c
        std::vector<double> weight;          // alpha_mn * P_m per sharing CV
        std::vector<cplx> direct;            // h_mn
        std::vector<CVec> cascade;           // conj(h_Rn,l) h_mR,l (no psi)
    };
    std::vector<PairBlock> pairs_;
    std::vector<double> psi_;
};

/// Penalty-based alternating solve of the coupled reflection/refraction
/// profile. Psi is carried through unchanged. The returned profile satisfies
/// the energy-split and phase-coupling invariants exactly by construction;
/// if the candidate ends up worse than the initial profile (lexicographic:
/// outage violation, then sum rate), the initial one is returned flagged.
PhaseResult solve_phases(const ChannelSet& cs, const SpectrumAssignment& a,
                         const ScenarioConfig& cfg, const RicsProfile& init,
                         const PhaseOptions& opts = {});

}  // namespace rics
