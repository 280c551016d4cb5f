#include "rics/solver_offload.hpp"

#include <algorithm>
#include <cmath>

#include "rics/metrics.hpp"

namespace rics {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kRhoTol = 1e-10;

double tau_total(double rho, double rate_bps, double f_hz,
                 const ScenarioConfig& cfg) {
    const double cycles = cfg.task_cycles();
    const double local = (1.0 - rho) * cycles / f_hz;
    double offload = 0.0;
    if (rho > 0.0 && rate_bps > 0.0)
        offload = rho * (cfg.task_bits / rate_bps + cycles / cfg.edge_cpu);
    return std::max(local, offload);
}

double quad_surrogate(double rho, double mu, double rate_bps, double f_hz,
                      const ScenarioConfig& cfg) {
    const double inner =
        cfg.edge_accuracy * (cfg.accuracy_ratio + rho * (1.0 - cfg.accuracy_ratio));
    return 2.0 * mu * std::sqrt(inner) -
           mu * mu * tau_total(rho, rate_bps, f_hz, cfg);
}

/// Golden-section maximization of a concave function on [0,1], endpoints
/// included.
template <typename F>
double golden_max(F f) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > kRhoTol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double best = 0.5 * (a + b);
    double best_val = f(best);
    for (double cand : {0.0, 1.0}) {
        const double v = f(cand);
        if (v > best_val) {
            best_val = v;
            best = cand;
        }
    }
    return best;
}

}  // namespace

double delay_breakpoint(double rate_bps, double f_hz, const ScenarioConfig& cfg) {
    const double cycles = cfg.task_cycles();
    const double local_slope = cycles / f_hz;
    if (rate_bps <= 0.0) return 0.0;  // offloading impossible
    const double offload_slope = cfg.task_bits / rate_bps + cycles / cfg.edge_cpu;
    return local_slope / (local_slope + offload_slope);
}

std::vector<double> update_mu(const std::vector<double>& rho,
                              const std::vector<double>& rates_bps,
                              const std::vector<double>& local_cpu,
                              const ScenarioConfig& cfg) {
    std::vector<double> mu(rho.size());
    for (std::size_t m = 0; m < rho.size(); ++m) {
        const double tau = tau_total(rho[m], rates_bps[m], local_cpu[m], cfg);
        if (tau <= 0.0)
            throw DegenerateDelay("update_mu: zero total delay");
        const double inner = cfg.edge_accuracy *
                             (cfg.accuracy_ratio + rho[m] * (1.0 - cfg.accuracy_ratio));
        mu[m] = std::sqrt(inner) / tau;
    }
    return mu;
}

std::vector<double> maximize_rho_given_mu(const std::vector<double>& mu,
                                          const std::vector<double>& rates_bps,
                                          const std::vector<double>& local_cpu,
                                          const ScenarioConfig& cfg) {
    std::vector<double> rho(mu.size());
    for (std::size_t m = 0; m < mu.size(); ++m) {
        if (rates_bps[m] <= 0.0) {
            rho[m] = 0.0;
            continue;
        }
        if (mu[m] == 0.0) {
            rho[m] = delay_breakpoint(rates_bps[m], local_cpu[m], cfg);
            continue;
        }
        const double mu_m = mu[m];
        const double rate = rates_bps[m];
        const double f = local_cpu[m];
        rho[m] = golden_max(
            [&](double r) { return quad_surrogate(r, mu_m, rate, f, cfg); });
    }
    return rho;
}

FpState solve_offload(const std::vector<double>& rho0,
                      const std::vector<double>& rates_bps,
                      const std::vector<double>& local_cpu,
                      const ScenarioConfig& cfg) {
    FpState st;
    st.rho = rho0;
    for (std::size_t m = 0; m < st.rho.size(); ++m)
        if (rates_bps[m] <= 0.0) st.rho[m] = 0.0;  // offloading impossible

    auto objective = [&](const std::vector<double>& rho) {
        double sum = 0.0;
        for (std::size_t m = 0; m < rho.size(); ++m)
            sum += safety_coefficient(rho[m], rates_bps[m], local_cpu[m], cfg);
        return sum;
    };

    double prev = objective(st.rho);
    st.hit_iteration_cap = true;
    for (int k = 1; k <= kMaxIterations; ++k) {
        st.mu = update_mu(st.rho, rates_bps, local_cpu, cfg);
        st.rho = maximize_rho_given_mu(st.mu, rates_bps, local_cpu, cfg);
        st.objective = objective(st.rho);
        st.iterations = k;
        st.trace.push_back(st.objective);
        const double scale = std::max(std::fabs(st.objective), 1e-300);
        if ((st.objective - prev) / scale <= cfg.aioa_tol) {
            st.hit_iteration_cap = false;
            break;
        }
        prev = st.objective;
    }
    return st;
}

}  // namespace rics
