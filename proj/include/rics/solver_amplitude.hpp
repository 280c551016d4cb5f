#pragma once

#include <vector>

#include "rics/channel.hpp"
#include "rics/config.hpp"
#include "rics/profile.hpp"

namespace rics {

struct AmplitudeOptions {
    double psi_lo = 0.5;
    double psi_hi = 2.0;
    int iteration_cap = 500;
};

struct AmplitudeResult {
    std::vector<double> psi;
    std::vector<double> objective_trace;          // per accepted iteration
    std::vector<std::vector<double>> psi_trace;   // snapshots (incl. start)
    double grad_norm = 0.0;
    bool hit_iteration_cap = false;
};

/// Sum of squared interference residuals over sharing (alpha >= 0.5) pairs:
///   sum |h_mn + sum_i psi_i sqrt(beta_t,i) e^{j theta_t,i}
///                 conj(h_Rn,i) h_mR,i|^2,
/// a quadratic polynomial in psi. Profile phases/amplitudes are taken from
/// `p`; its psi entries are ignored in favour of the argument.
double ls_objective(const std::vector<double>& psi, const ChannelSet& cs,
                    const SpectrumAssignment& a, const RicsProfile& p,
                    const ScenarioConfig& cfg);

/// Analytic gradient of ls_objective.
std::vector<double> ls_gradient(const std::vector<double>& psi,
                                const ChannelSet& cs,
                                const SpectrumAssignment& a,
                                const RicsProfile& p,
                                const ScenarioConfig& cfg);

/// Projected gradient descent from psi = 1 with backtracking line search
/// seeded at cfg.gd_rate; stops when the projected-gradient mapping norm
/// drops below cfg.gd_tol or at the iteration cap (best-so-far, flagged).
AmplitudeResult solve_amplitude_gd(const ChannelSet& cs,
                                   const SpectrumAssignment& a,
                                   const RicsProfile& p,
                                   const ScenarioConfig& cfg,
                                   const AmplitudeOptions& opts = {});

}  // namespace rics
