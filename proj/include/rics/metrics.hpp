#pragma once

#include "rics/channel.hpp"
#include "rics/config.hpp"
#include "rics/profile.hpp"

namespace rics {

/// Which cascade paths the surface contributes. `reflect_only` models a
/// conventional RIS (no refraction); `off` removes the surface entirely.
/// The carried profile stays valid either way.
enum class RicsMode { full, reflect_only, off };

/// Reflection diagonal entries sqrt(beta_r)e^{j theta_r} (psi never applies
/// to the reflection path).
CVec reflection_coeffs(const RicsProfile& p);
/// Refraction diagonal entries psi*sqrt(beta_t)e^{j theta_t}.
CVec refraction_coeffs(const RicsProfile& p);

/// Uplink SINR of CV m at the BS (linear).
double sinr_v2i(int m, const ChannelSet& cs, const RicsProfile& p,
                const SpectrumAssignment& a, const ScenarioConfig& cfg,
                RicsMode mode = RicsMode::full);

/// SINR at the receiver of pair n (linear).
double sinr_v2v(int n, const ChannelSet& cs, const RicsProfile& p,
                const SpectrumAssignment& a, const ScenarioConfig& cfg,
                RicsMode mode = RicsMode::full);

/// Shannon rate in bits/s.
double rate(double sinr_linear, double bandwidth_hz);

struct DelayTriple {
    double local_s = 0.0;
    double offload_s = 0.0;
    double total_s = 0.0;  // max of the two
};

/// Local, offloading and total delay for offloading ratio rho with uplink
/// rate rate_bps and local CPU f_hz. Throws ZeroRateWithOffload when rho > 0
/// and the rate is not positive.
DelayTriple delays(double rho, double rate_bps, double f_hz,
                   const ScenarioConfig& cfg);

/// (1-rho)*lambda*A_B + rho*A_B.
double avg_accuracy(double rho, double lambda, double a_b);

/// Safety coefficient: average accuracy over total delay [1/s]. Throws
/// DegenerateDelay when both delays vanish.
double safety_coefficient(double rho, double rate_bps, double f_hz,
                          const ScenarioConfig& cfg);

/// Sigmoid step approximation 1/(1+e^{-omega x}).
double smooth_step(double x, double omega);

/// Closed-form expected V2V SINR of pair n under the current assignment and
/// profile. Per sharing CV the expected interference power is
///   pl_mn^2 + (pl_Rn*pl_mR)^2 * (|H1|^2 + T(kappa_Rn + kappa_mR + 1))
///              / ((1+kappa_Rn)(1+kappa_mR)),
/// with H1 = sqrt(kappa_Rn*kappa_mR) * los_Rn^H Phi_t los_mR and
/// T = sum_l |s_l^t|^2 (equals L for a unit-amplitude Phi_t). Pass a
/// normalized ChannelSet to evaluate the paper-style unit-path-loss form.
double expected_v2v_sinr(int n, const ChannelSet& cs, const RicsProfile& p,
                         const SpectrumAssignment& a, const ScenarioConfig& cfg,
                         RicsMode mode = RicsMode::full);

/// Effective threshold gamma_th + (1/omega) ln(1/P_outage - 1).
double outage_threshold(double gamma_th, double omega, double p_outage);

/// Constraint direction: expected SINR >= threshold (closed at equality).
bool check_outage_constraint(double gamma_n, double gamma_c);

struct SafetyRow {
    int cv = 0;
    double rho = 0.0;
    double rate_bps = 0.0;
    double tau_local_s = 0.0;
    double tau_offload_s = 0.0;
    double tau_s = 0.0;
    double accuracy = 0.0;
    double safety = 0.0;
};

struct SafetyReport {
    std::vector<SafetyRow> rows;
    double sum_safety = 0.0;
    double mean_safety = 0.0;
    double sum_v2v_rate_bps = 0.0;
};

/// Full per-CV evaluation of a solution.
SafetyReport evaluate_solution(const ChannelSet& cs, const Scenario& sc,
                               const RicsProfile& p, const OffloadPlan& plan,
                               const SpectrumAssignment& a,
                               const ScenarioConfig& cfg,
                               RicsMode mode = RicsMode::full);

}  // namespace rics
