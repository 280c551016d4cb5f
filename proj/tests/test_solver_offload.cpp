#include "doctest.h"

#include "rics/metrics.hpp"
#include "rics/solver_offload.hpp"

using namespace rics;

namespace {

double grid_argmax_safety(double rate_bps, double f_hz, const ScenarioConfig& cfg) {
    double best_rho = 0.0, best = -1.0;
    for (int i = 0; i <= 100000; ++i) {
        const double rho = i * 1e-5;
        const double s = safety_coefficient(rho, rate_bps, f_hz, cfg);
        if (s > best) {
            best = s;
            best_rho = rho;
        }
    }
    return best_rho;
}

}  // namespace

TEST_CASE("update_mu reduction at rho 0") {
    ScenarioConfig cfg;  // lambda 0.8, A_B 0.9, c = 1.5e9
    const std::vector<double> mu =
        update_mu({0.0}, {1e7}, {2e9}, cfg);
    // mu = sqrt(lambda A_B) * f / c
    CHECK(mu[0] == doctest::Approx(std::sqrt(0.8 * 0.9) * 2e9 / 1.5e9).epsilon(1e-12));
}

TEST_CASE("quadratic transform fixed point identity") {
    // With mu = sqrt(X(rho))/tau(rho), the surrogate equals S(rho) exactly.
    ScenarioConfig cfg;
    const double rho = 0.42, rate_bps = 1.7e7, f = 3.1e9;
    const auto mu = update_mu({rho}, {rate_bps}, {f}, cfg);
    const DelayTriple d = delays(rho, rate_bps, f, cfg);
    const double inner =
        cfg.edge_accuracy * (cfg.accuracy_ratio + rho * (1.0 - cfg.accuracy_ratio));
    const double surrogate =
        2.0 * mu[0] * std::sqrt(inner) - mu[0] * mu[0] * d.total_s;
    CHECK(surrogate ==
          doctest::Approx(safety_coefficient(rho, rate_bps, f, cfg)).epsilon(1e-12));
}

TEST_CASE("update_mu numeric instance") {
    ScenarioConfig cfg;
    const double rho = 0.6, rate_bps = 2.5e7, f = 4e9;
    const auto mu = update_mu({rho}, {rate_bps}, {f}, cfg);
    const DelayTriple d = delays(rho, rate_bps, f, cfg);
    const double inner = 0.9 * (0.8 + rho * 0.2);
    CHECK(mu[0] == doctest::Approx(std::sqrt(inner) / d.total_s).epsilon(1e-12));
}

TEST_CASE("maximize_rho degenerate mu picks the delay breakpoint") {
    ScenarioConfig cfg;
    const double rate_bps = 2e7, f = 2e9;
    const auto rho = maximize_rho_given_mu({0.0}, {rate_bps}, {f}, cfg);
    CHECK(rho[0] == doctest::Approx(delay_breakpoint(rate_bps, f, cfg)).epsilon(1e-9));
    const DelayTriple d = delays(rho[0], rate_bps, f, cfg);
    CHECK(d.local_s == doctest::Approx(d.offload_s).epsilon(1e-6));
}

TEST_CASE("free offloading drives rho to 1") {
    ScenarioConfig cfg;
    cfg.edge_cpu = 1e18;
    const auto mu = update_mu({0.5}, {1e15}, {2e9}, cfg);
    const auto rho = maximize_rho_given_mu(mu, {1e15}, {2e9}, cfg);
    CHECK(rho[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("inner maximization matches a fine grid") {
    ScenarioConfig cfg;
    auto rng = substream(7, 0x4f464cULL);
    std::uniform_real_distribution<double> urate(5e6, 5e7), uf(1e9, 5e9),
        urho(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double rate_bps = urate(rng), f = uf(rng);
        const auto mu = update_mu({urho(rng)}, {rate_bps}, {f}, cfg);
        const auto rho = maximize_rho_given_mu(mu, {rate_bps}, {f}, cfg);

        // grid argmax of the same surrogate
        double best = -1e300, best_rho = 0.0;
        const double inner_c = cfg.edge_accuracy * (1.0 - cfg.accuracy_ratio);
        const double inner_0 = cfg.edge_accuracy * cfg.accuracy_ratio;
        for (int i = 0; i <= 100000; ++i) {
            const double r = i * 1e-5;
            const DelayTriple d = delays(r, rate_bps, f, cfg);
            const double val = 2.0 * mu[0] * std::sqrt(inner_0 + inner_c * r) -
                               mu[0] * mu[0] * d.total_s;
            if (val > best) {
                best = val;
                best_rho = r;
            }
        }
        CHECK(std::fabs(rho[0] - best_rho) <= 2e-5);
        const DelayTriple d = delays(rho[0], rate_bps, f, cfg);
        const double val = 2.0 * mu[0] * std::sqrt(inner_0 + inner_c * rho[0]) -
                           mu[0] * mu[0] * d.total_s;
        CHECK(val >= best - 1e-9);
    }
}

TEST_CASE("solve_offload converges to the grid argmax of the safety itself") {
    ScenarioConfig cfg;
    const double rate_bps = 1.2e7, f = 1.8e9;
    const FpState st = solve_offload({0.5}, {rate_bps}, {f}, cfg);
    const double grid = grid_argmax_safety(rate_bps, f, cfg);
    CHECK(std::fabs(st.rho[0] - grid) <= 2e-5);
    CHECK(st.rho[0] >= 0.0);
    CHECK(st.rho[0] <= 1.0);
}

TEST_CASE("solve_offload trace is non-decreasing") {
    ScenarioConfig cfg;
    cfg.aioa_tol = 1e-12;  // force several iterations
    std::vector<double> rates = {8e6, 2.5e7, 4e7};
    std::vector<double> cpus = {1.1e9, 2.7e9, 4.4e9};
    const FpState st = solve_offload({0.1, 0.9, 0.4}, rates, cpus, cfg);
    for (std::size_t i = 1; i < st.trace.size(); ++i)
        CHECK(st.trace[i] >= st.trace[i - 1] - 1e-9);
}

TEST_CASE("infinite tolerance stops after exactly one iteration") {
    ScenarioConfig cfg;
    cfg.aioa_tol = std::numeric_limits<double>::infinity();
    const FpState st = solve_offload({0.3}, {2e7}, {2e9}, cfg);
    CHECK(st.iterations == 1);
    CHECK(!st.hit_iteration_cap);
}

TEST_CASE("per-CV separability: joint equals independent") {
    ScenarioConfig cfg;
    std::vector<double> rates = {9e6, 3e7};
    std::vector<double> cpus = {1.5e9, 3.5e9};
    const FpState joint = solve_offload({0.5, 0.5}, rates, cpus, cfg);
    const FpState first = solve_offload({0.5}, {rates[0]}, {cpus[0]}, cfg);
    const FpState second = solve_offload({0.5}, {rates[1]}, {cpus[1]}, cfg);
    CHECK(joint.rho[0] == doctest::Approx(first.rho[0]).epsilon(1e-9));
    CHECK(joint.rho[1] == doctest::Approx(second.rho[0]).epsilon(1e-9));
}

TEST_CASE("zero rate forces local computing") {
    ScenarioConfig cfg;
    const FpState st = solve_offload({0.7}, {0.0}, {2e9}, cfg);
    CHECK(st.rho[0] == 0.0);
}
