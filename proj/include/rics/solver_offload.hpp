#pragma once

#include <vector>

#include "rics/config.hpp"

namespace rics {

/// State of the quadratic-transform fractional-programming loop.
struct FpState {
    std::vector<double> mu;
    std::vector<double> rho;
    double objective = 0.0;            // sum of safety coefficients
    int iterations = 0;
    std::vector<double> trace;         // objective per accepted iteration
    bool hit_iteration_cap = false;
};

/// mu_m = sqrt(A_B (lambda + rho_m (1-lambda))) / tau_m(rho_m).
/// Throws DegenerateDelay if some tau_m(rho_m) is zero.
std::vector<double> update_mu(const std::vector<double>& rho,
                              const std::vector<double>& rates_bps,
                              const std::vector<double>& local_cpu,
                              const ScenarioConfig& cfg);

/// Per-CV maximization of 2 mu sqrt(A_B(lambda + rho(1-lambda))) - mu^2
/// tau(rho) over rho in [0,1], by golden-section search (the objective is
/// concave with one kink at the delay breakpoint). mu = 0 returns the
/// delay-balancing breakpoint.
std::vector<double> maximize_rho_given_mu(const std::vector<double>& mu,
                                          const std::vector<double>& rates_bps,
                                          const std::vector<double>& local_cpu,
                                          const ScenarioConfig& cfg);

/// Alternates update_mu / maximize_rho_given_mu until the relative objective
/// improvement drops below cfg.aioa_tol or the iteration cap; monotone ascent.
FpState solve_offload(const std::vector<double>& rho0,
                      const std::vector<double>& rates_bps,
                      const std::vector<double>& local_cpu,
                      const ScenarioConfig& cfg);

/// rho at which local and offload delay are equal (the kink of tau).
double delay_breakpoint(double rate_bps, double f_hz, const ScenarioConfig& cfg);

}  // namespace rics
