#include "doctest.h"

#include "rics/metrics.hpp"
#include "rics/solver_phase.hpp"

using namespace rics;

namespace {

struct World {
    ScenarioConfig cfg;
    Scenario sc;
    ChannelSet cs;
    SpectrumAssignment alpha;
};

World make_world(int m_cnt, int n_cnt, int len, std::uint64_t seed) {
    World w;
    w.cfg.num_cvs = m_cnt;
    w.cfg.num_v2v_pairs = n_cnt;
    w.cfg.num_elements = len;
    // geometry where the cascade is a visible fraction of the direct link
    w.cfg.field_radius = 100.0;
    w.cfg.bs_position = Vec3{0.0, 0.0, 5.0};
    w.cfg.rics_position = Vec3{3.0, 0.0, 5.0};
    w.cfg.vehicle_density = 0.2;
    w.sc = build_scenario(w.cfg, seed);
    w.cs = assemble_channels(w.sc, w.cfg, seed);
    w.alpha = SpectrumAssignment::zeros(m_cnt, n_cnt);
    return w;
}

}  // namespace

TEST_CASE("build_effective_channel") {
    const CVec ones(3, 1.0);
    const CVec id = build_effective_channel(ones, ones);
    for (const auto& z : id) CHECK(z == cplx(1.0, 0.0));

    auto rng = substream(2, 0x454643ULL);
    CVec a(3), b(3);
    for (int l = 0; l < 3; ++l) {
        a[l] = complex_gaussian(rng);
        b[l] = complex_gaussian(rng);
    }
    const CVec prod = build_effective_channel(a, b);
    for (int l = 0; l < 3; ++l) CHECK(std::abs(prod[l] - a[l] * b[l]) < 1e-15);

    // linear in each argument
    const cplx s(0.4, -0.9);
    CVec a2(3);
    for (int l = 0; l < 3; ++l) a2[l] = s * a[l];
    const CVec scaled = build_effective_channel(a2, b);
    for (int l = 0; l < 3; ++l) CHECK(std::abs(scaled[l] - s * prod[l]) < 1e-14);

    CHECK_THROWS_AS(build_effective_channel(a, CVec(2, 1.0)), LengthMismatch);
}

TEST_CASE("lifted numerator identity: Theta^H h_B equals the cascaded gain") {
    // h_RB Phi_r h_mR == Theta_r^H (h_RB o h_mR) with Theta_r = conj(diag).
    auto rng = substream(4, 0x4c4946ULL);
    CVec h_rb(5), h_mr(5), diag(5);
    for (int l = 0; l < 5; ++l) {
        h_rb[l] = complex_gaussian(rng);
        h_mr[l] = complex_gaussian(rng);
        diag[l] = std::polar(0.8, 1.1 * l);
    }
    const cplx direct = cascaded_gain(h_rb, diag, h_mr, 0.0);
    const CVec h_b = build_effective_channel(h_rb, h_mr);
    cplx lifted = 0.0;
    for (int l = 0; l < 5; ++l) lifted += std::conj(std::conj(diag[l])) * h_b[l];
    CHECK(std::abs(direct - lifted) < 1e-12);
}

TEST_CASE("coupled_phase_update closed forms") {
    // u_r = 0: both branches coincide at -arg(conj(u_t)).
    const cplx u_t = std::polar(2.0, 0.7);
    const PhaseBranches dec = coupled_phase_update(u_t, 0.0);
    CHECK(dec.theta_t_quarter == doctest::Approx(-std::arg(std::conj(u_t))));
    CHECK(dec.theta_t_three_quarter == doctest::Approx(dec.theta_t_quarter));
    CHECK(dec.objective_quarter == doctest::Approx(2.0));

    // u_t = u_r = 1: the +pi/2 branch attains |1 + j| = sqrt(2).
    const PhaseBranches both = coupled_phase_update(1.0, 1.0);
    CHECK(both.objective_quarter == doctest::Approx(std::sqrt(2.0)));
    CHECK(both.theta_t_quarter == doctest::Approx(-kPi / 4.0));
}

TEST_CASE("coupled_phase_update matches a dense grid per branch") {
    auto rng = substream(6, 0x504755ULL);
    for (int trial = 0; trial < 20; ++trial) {
        const cplx u_t = complex_gaussian(rng);
        const cplx u_r = complex_gaussian(rng);
        const PhaseBranches br = coupled_phase_update(u_t, u_r);
        for (int branch = 0; branch < 2; ++branch) {
            const double offset = branch == 0 ? kPi / 2.0 : 1.5 * kPi;
            const double closed =
                branch == 0 ? br.objective_quarter : br.objective_three_quarter;
            const double theta =
                branch == 0 ? br.theta_t_quarter : br.theta_t_three_quarter;
            double grid_best = -1e300;
            for (int i = 0; i < 10000; ++i) {
                const double t = 2.0 * kPi * i / 10000.0;
                const double val =
                    (std::conj(u_t) * std::polar(1.0, t)).real() +
                    (std::conj(u_r) * std::polar(1.0, t + offset)).real();
                grid_best = std::max(grid_best, val);
            }
            CHECK(closed >= grid_best - 1e-6);
            const double at_theta =
                (std::conj(u_t) * std::polar(1.0, theta)).real() +
                (std::conj(u_r) * std::polar(1.0, theta + offset)).real();
            CHECK(at_theta == doctest::Approx(closed).epsilon(1e-9));
        }
    }
}

TEST_CASE("coupled_amplitude_update cases and grid check") {
    {
        const auto [st, sr] = coupled_amplitude_update(1.0, 1.0);
        CHECK(st == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(sr == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    {
        const auto [st, sr] = coupled_amplitude_update(3.0, 4.0);
        CHECK(st == doctest::Approx(0.6));
        CHECK(sr == doctest::Approx(0.8));
    }
    {
        const auto [st, sr] = coupled_amplitude_update(1.0, -1.0);
        CHECK(st == 1.0);
        CHECK(sr == 0.0);
    }
    {
        const auto [st, sr] = coupled_amplitude_update(-2.0, 5.0);
        CHECK(st == 0.0);
        CHECK(sr == 1.0);
    }
    {
        // both negative: best boundary, never (0,0)
        const auto [st, sr] = coupled_amplitude_update(-1.0, -3.0);
        CHECK(st == 1.0);
        CHECK(sr == 0.0);
    }

    auto rng = substream(8, 0x414d50ULL);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = u(rng), b = u(rng);
        const auto [st, sr] = coupled_amplitude_update(a, b);
        CHECK(st * st + sr * sr == doctest::Approx(1.0).epsilon(1e-12));
        double grid_best = -1e300;
        for (int i = 0; i <= 10000; ++i) {
            const double bt = static_cast<double>(i) / 10000.0;
            grid_best = std::max(grid_best,
                                 a * std::sqrt(bt) + b * std::sqrt(1.0 - bt));
        }
        CHECK(a * st + b * sr >= grid_best - 1e-4);
    }
}

TEST_CASE("beamformer gradient matches finite differences") {
    World w = make_world(2, 2, 4, 73);
    for (int m = 0; m < 2; ++m) w.alpha.alpha[m][m] = 1.0;
    RicsProfile prof = random_profile(4, 5);
    PhaseOptions popt;
    PhaseWorkspace ws(w.cs, w.alpha, w.cfg, prof.psi, popt);

    auto rng = substream(10, 0x474459ULL);
    CVec v_t(4), v_r(4), vt_t(4), vr_t(4);
    for (int l = 0; l < 4; ++l) {
        v_t[l] = complex_gaussian(rng);
        v_r[l] = complex_gaussian(rng);
        vt_t[l] = complex_gaussian(rng);
        vr_t[l] = complex_gaussian(rng);
    }
    const double eta = 0.9, weight = 1.7;
    CVec gt, gr;
    ws.gradient(v_t, v_r, vt_t, vr_t, eta, weight, gt, gr);

    const double h = 1e-6;
    auto probe = [&](CVec& vec, int l, bool imag, double d) {
        const cplx save = vec[l];
        vec[l] += imag ? cplx(0.0, d) : cplx(d, 0.0);
        const double val = ws.objective(v_t, v_r, vt_t, vr_t, eta, weight);
        vec[l] = save;
        return val;
    };
    for (int l = 0; l < 4; ++l) {
        for (bool imag : {false, true}) {
            const double fd_t = (probe(v_t, l, imag, h) - probe(v_t, l, imag, -h)) / (2 * h);
            const double fd_r = (probe(v_r, l, imag, h) - probe(v_r, l, imag, -h)) / (2 * h);
            const double an_t = 2.0 * (imag ? gt[l].imag() : gt[l].real());
            const double an_r = 2.0 * (imag ? gr[l].imag() : gr[l].real());
            CHECK(std::fabs(fd_t - an_t) <= 1e-5 * std::max(1.0, std::fabs(fd_t)));
            CHECK(std::fabs(fd_r - an_r) <= 1e-5 * std::max(1.0, std::fabs(fd_r)));
        }
    }
}

TEST_CASE("huge eta reduces the ascent to pure rate climbing") {
    World w = make_world(2, 1, 3, 79);
    RicsProfile prof = initial_profile(3, 3);
    PhaseOptions popt;
    PhaseWorkspace ws(w.cs, w.alpha, w.cfg, prof.psi, popt);
    auto rng = substream(12, 0x455441ULL);
    CVec v_t(3), v_r(3), vt_t(3), vr_t(3);
    for (int l = 0; l < 3; ++l) {
        v_t[l] = complex_gaussian(rng);
        v_r[l] = complex_gaussian(rng);
        vt_t[l] = v_t[l];
        vr_t[l] = v_r[l];
    }
    CVec base_r = v_r;
    const double rate0 = ws.sum_rate(base_r);
    auto accepted = ws.ascend(v_t, v_r, vt_t, vr_t, 1e12, 0.0, 10);
    CHECK(!accepted.empty());
    CHECK(ws.sum_rate(v_r) > rate0);
    // theta trace non-decreasing over accepted steps
    for (std::size_t i = 1; i < accepted.size(); ++i)
        CHECK(accepted[i] >= accepted[i - 1]);
}

TEST_CASE("solve_phases on L=2 reaches the exhaustive grid optimum") {
    World w = make_world(1, 1, 2, 83);
    RicsProfile init = initial_profile(2, 3);
    PhaseOptions popt;
    popt.v2v_soft_weight = 0.0;  // no interference constraint active (alpha=0)
    const PhaseResult res = solve_phases(w.cs, w.alpha, w.cfg, init, popt);

    PhaseWorkspace ws(w.cs, w.alpha, w.cfg, init.psi, popt);
    CVec vr(2);
    for (int l = 0; l < 2; ++l) vr[l] = res.profile.reflection_coeff(l);
    const double solved = ws.sum_rate(vr);

    double grid_best = -1e300;
    const int t_pts = 60, b_pts = 12;
    for (int t1 = 0; t1 < t_pts; ++t1)
        for (int b1 = 0; b1 <= b_pts; ++b1)
            for (int t2 = 0; t2 < t_pts; ++t2)
                for (int b2 = 0; b2 <= b_pts; ++b2) {
                    CVec cand(2);
                    cand[0] = std::polar(std::sqrt(static_cast<double>(b1) / b_pts),
                                         2.0 * kPi * t1 / t_pts);
                    cand[1] = std::polar(std::sqrt(static_cast<double>(b2) / b_pts),
                                         2.0 * kPi * t2 / t_pts);
                    grid_best = std::max(grid_best, ws.sum_rate(cand));
                }
    CHECK(solved >= grid_best - 1e-3);
}

TEST_CASE("solve_phases output satisfies the coupled invariants exactly") {
    World w = make_world(3, 2, 6, 89);
    w.alpha.alpha[0][0] = 1.0;
    RicsProfile init = initial_profile(6, 9);
    const PhaseResult res = solve_phases(w.cs, w.alpha, w.cfg, init);
    CHECK(res.profile.violations(0.5, 2.0).empty());
    for (int l = 0; l < 6; ++l)
        CHECK(res.profile.beta_r[l] + res.profile.beta_t[l] == 1.0);
}

TEST_CASE("solved profile beats a random profile on most seeds") {
    int wins = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        World w = make_world(3, 1, 8, 100 + s);
        RicsProfile init = initial_profile(8, 100 + s);
        PhaseOptions popt;
        const PhaseResult res = solve_phases(w.cs, w.alpha, w.cfg, init, popt);
        PhaseWorkspace ws(w.cs, w.alpha, w.cfg, init.psi, popt);
        CVec vr_solved(8), vr_rand(8);
        const RicsProfile rnd = random_profile(8, 900 + s);
        for (int l = 0; l < 8; ++l) {
            vr_solved[l] = res.profile.reflection_coeff(l);
            vr_rand[l] = rnd.reflection_coeff(l);
        }
        if (ws.sum_rate(vr_solved) >= ws.sum_rate(vr_rand)) ++wins;
    }
    CHECK(wins >= 18);  // >= 90% of 20 seeds
}

TEST_CASE("reflect-only mode pins the energy split") {
    World w = make_world(2, 1, 4, 97);
    RicsProfile init = initial_profile(4, 1);
    PhaseOptions popt;
    popt.reflect_only = true;
    const PhaseResult res = solve_phases(w.cs, w.alpha, w.cfg, init, popt);
    for (int l = 0; l < 4; ++l) {
        CHECK(res.profile.beta_r[l] == 1.0);
        CHECK(res.profile.beta_t[l] == 0.0);
    }
    CHECK(res.profile.violations(0.5, 2.0).empty());
}
