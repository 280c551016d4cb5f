#include "rics/profile.hpp"

#include <cmath>
#include <random>

namespace rics {

namespace {

constexpr double kCouplingTol = 1e-9;

bool coupled(double theta_t, double theta_r) {
    const double diff = std::fabs(wrap_angle(theta_t) - wrap_angle(theta_r));
    return std::fabs(diff - kPi / 2.0) <= kCouplingTol ||
           std::fabs(diff - 3.0 * kPi / 2.0) <= kCouplingTol;
}

}  // namespace

std::vector<std::string> RicsProfile::violations(double psi_lo, double psi_hi) const {
    std::vector<std::string> errs;
    const std::size_t L = theta_r.size();
    if (theta_t.size() != L || beta_r.size() != L || beta_t.size() != L ||
        psi.size() != L) {
        errs.emplace_back("profile vectors have inconsistent lengths");
        return errs;
    }
    for (std::size_t l = 0; l < L; ++l) {
        if (std::fabs(beta_r[l] + beta_t[l] - 1.0) > kCouplingTol)
            errs.push_back("beta_r + beta_t != 1 at element " + std::to_string(l));
        if (beta_r[l] < -kCouplingTol || beta_r[l] > 1.0 + kCouplingTol ||
            beta_t[l] < -kCouplingTol || beta_t[l] > 1.0 + kCouplingTol)
            errs.push_back("beta outside [0,1] at element " + std::to_string(l));
        if (!coupled(theta_t[l], theta_r[l]))
            errs.push_back("phase coupling violated at element " + std::to_string(l));
        if (psi[l] < psi_lo - kCouplingTol || psi[l] > psi_hi + kCouplingTol)
            errs.push_back("psi outside feasible range at element " + std::to_string(l));
    }
    return errs;
}

RicsProfile initial_profile(int num_elements, std::uint64_t seed) {
    RicsProfile p;
    p.theta_r.resize(num_elements);
    p.theta_t.resize(num_elements);
    p.beta_r.assign(num_elements, 0.5);
    p.beta_t.assign(num_elements, 0.5);
    p.psi.assign(num_elements, 1.0);
    auto rng = substream(seed, 0x50524f46ULL);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int l = 0; l < num_elements; ++l) {
        p.theta_r[l] = wrap_angle(angle(rng));
        p.theta_t[l] = wrap_angle(p.theta_r[l] + kPi / 2.0);
    }
    return p;
}

RicsProfile random_profile(int num_elements, std::uint64_t seed) {
    RicsProfile p = initial_profile(num_elements, seed);
    auto rng = substream(seed, 0x524e4450ULL);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::bernoulli_distribution branch(0.5);
    for (int l = 0; l < num_elements; ++l) {
        p.theta_r[l] = wrap_angle(angle(rng));
        const double offset = branch(rng) ? kPi / 2.0 : 3.0 * kPi / 2.0;
        p.theta_t[l] = wrap_angle(p.theta_r[l] + offset);
    }
    return p;
}

std::vector<std::string> OffloadPlan::violations() const {
    std::vector<std::string> errs;
    for (std::size_t m = 0; m < rho.size(); ++m)
        if (rho[m] < 0.0 || rho[m] > 1.0)
            errs.push_back("rho outside [0,1] at CV " + std::to_string(m));
    return errs;
}

SpectrumAssignment SpectrumAssignment::zeros(int m_cnt, int n_cnt, bool bin) {
    SpectrumAssignment a;
    a.alpha.assign(m_cnt, std::vector<double>(n_cnt, 0.0));
    a.binary = bin;
    return a;
}

double SpectrumAssignment::row_sum(int m) const {
    double s = 0.0;
    for (double v : alpha[m]) s += v;
    return s;
}

std::vector<std::string> SpectrumAssignment::violations() const {
    std::vector<std::string> errs;
    constexpr double tol = 1e-9;
    for (std::size_t m = 0; m < alpha.size(); ++m) {
        double sum = 0.0;
        for (double v : alpha[m]) {
            sum += v;
            if (v < -tol || v > 1.0 + tol)
                errs.push_back("alpha outside [0,1] in row " + std::to_string(m));
            if (binary && std::fabs(v) > tol && std::fabs(v - 1.0) > tol)
                errs.push_back("non-binary alpha in row " + std::to_string(m));
        }
        if (sum > 1.0 + tol)
            errs.push_back("row sum exceeds 1 in row " + std::to_string(m));
    }
    return errs;
}

}  // namespace rics
