#pragma once

#include <vector>

#include "rics/channel.hpp"
#include "rics/config.hpp"
#include "rics/metrics.hpp"
#include "rics/profile.hpp"

namespace rics {

/// Numerically stable log(e^{tau_l} + e^{tau_o}); brackets max{tau_l, tau_o}
/// within ln 2.
double lse_delay_bound(double tau_local, double tau_offload);

struct DcParts {
    double p = 0.0;  // W log2(Xi1 + sum Xi2 P_t alpha + W xi0), concave
    double q = 0.0;  // W log2(sum Xi2 P_t alpha + W xi0), concave (subtracted)
};

/// DC split of the uplink rate: p - q == R_B^m exactly for any alpha.
DcParts rate_dc_parts(int m, const std::vector<std::vector<double>>& alpha,
                      const ChannelSet& cs, const RicsProfile& p,
                      const ScenarioConfig& cfg, RicsMode mode = RicsMode::full);

/// Affine surrogate of q_m around a reference row: value + grad . (row -
/// point). Tangent from above (q is concave).
struct LinearizedQ {
    double value_at_point = 0.0;
    std::vector<double> grad;
    std::vector<double> point;
    double eval(const std::vector<double>& row) const;
};
LinearizedQ taylor_linearize_q(int m, const std::vector<double>& alpha_row,
                               const ChannelSet& cs, const ScenarioConfig& cfg);

struct SpectrumOptions {
    int sca_cap = 30;
    int pgd_steps = 200;
    double share_bonus = 0.05;   // delay budget paid per served V2V pair, s
    double outage_weight0 = 1.0;
};

struct SpectrumResult {
    SpectrumAssignment alpha;                 // relaxed
    std::vector<double> objective_trace;      // true smoothed objective per SCA iter
    bool infeasible_start = false;
    double outage_weight = 0.0;
};

/// SCA outer loop over the log-sum-exp smoothed delay objective; inner convex
/// problems solved by projected gradient descent with the outage constraint
/// as an exact penalty max(0, gamma_c - gamma_n)^2 and per-row box/simplex
/// projection. Includes a small linear sharing bonus so spectrum reuse wins
/// ties when it costs nothing.
SpectrumResult solve_spectrum_sca(const SpectrumAssignment& alpha0,
                                  const ChannelSet& cs, const RicsProfile& p,
                                  const OffloadPlan& plan,
                                  const std::vector<double>& local_cpu,
                                  const ScenarioConfig& cfg,
                                  RicsMode mode = RicsMode::full,
                                  const SpectrumOptions& opts = {});

/// Per CV row: promote the largest entry >= 0.5 to 1 when the expected-SINR
/// outage constraints stay satisfied, else clear the row. Rows processed in
/// ascending CV order.
SpectrumAssignment round_assignment(const SpectrumAssignment& relaxed,
                                    const ChannelSet& cs, const RicsProfile& p,
                                    const ScenarioConfig& cfg,
                                    RicsMode mode = RicsMode::full);

/// Projection onto {0 <= x <= 1, sum x <= budget}.
std::vector<double> project_row_box_simplex(std::vector<double> row,
                                            double budget = 1.0);

}  // namespace rics
