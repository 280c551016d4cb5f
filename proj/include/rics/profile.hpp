#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rics/common.hpp"

namespace rics {

/// Per-element RICS configuration. Reflection coefficient sqrt(beta_r)e^{j
/// theta_r}; refraction coefficient psi*sqrt(beta_t)e^{j theta_t}. Hardware
/// constraints: beta_r + beta_t = 1 and |theta_t - theta_r| in {pi/2, 3pi/2}
/// per element.
struct RicsProfile {
    std::vector<double> theta_r;  // (0, 2pi]
    std::vector<double> theta_t;  // (0, 2pi]
    std::vector<double> beta_r;   // [0,1]
    std::vector<double> beta_t;   // [0,1]
    std::vector<double> psi;      // amplitude adjustment factors, > 0

    int size() const { return static_cast<int>(theta_r.size()); }
    cplx reflection_coeff(int l) const {
        return std::polar(std::sqrt(beta_r[l]), theta_r[l]);
    }
    cplx refraction_coeff(int l) const {
        return psi[l] * std::polar(std::sqrt(beta_t[l]), theta_t[l]);
    }

    /// Violated invariants (empty means valid). Phase coupling and the energy
    /// split are checked to 1e-9.
    std::vector<std::string> violations(double psi_lo, double psi_hi) const;
};

/// Uniform split (beta_r = beta_t = 0.5), theta_r drawn uniformly, coupled
/// theta_t = theta_r + pi/2, psi = 1.
RicsProfile initial_profile(int num_elements, std::uint64_t seed);

/// Random phases with a random coupling branch; beta fixed at 0.5/0.5, psi 1.
RicsProfile random_profile(int num_elements, std::uint64_t seed);

struct OffloadPlan {
    std::vector<double> rho;  // [0,1] each
    std::vector<std::string> violations() const;
};

struct SpectrumAssignment {
    std::vector<std::vector<double>> alpha;  // M x N, [0,1]
    bool binary = false;

    static SpectrumAssignment zeros(int m_cnt, int n_cnt, bool binary = false);
    double row_sum(int m) const;
    std::vector<std::string> violations() const;
};

}  // namespace rics
