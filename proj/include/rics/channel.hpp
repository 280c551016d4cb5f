#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rics/scenario.hpp"

namespace rics {

/// Every channel realization of one deployment, plus the LoS/path-loss
/// metadata the closed-form V2V expectation needs. Immutable after assembly;
/// safe to share read-only across threads.
struct ChannelSet {
    int num_cvs = 0;       // M
    int num_pairs = 0;     // N
    int num_elements = 0;  // L

    std::vector<cplx> h_mB;               // M, CV -> BS direct
    CVec h_RB;                            // L, RICS -> BS
    std::vector<CVec> h_mR;               // M x L, CV -> RICS
    std::vector<CVec> h_Rn;               // N x L, RICS -> Rx
    std::vector<cplx> h_n;                // N, Tx -> Rx
    std::vector<std::vector<cplx>> h_mn;  // M x N, CV -> Rx interference
    std::vector<cplx> h_nB;               // N, Tx -> BS interference

    // Second-moment metadata for the outage surrogate.
    std::vector<CVec> los_mR;             // M x L unit-modulus steering
    std::vector<CVec> los_Rn;             // N x L
    std::vector<double> pl_mR;            // M, per-hop amplitude path loss
    std::vector<double> pl_Rn;            // N
    std::vector<std::vector<double>> pl_mn;  // M x N
    std::vector<double> pl_n;             // N
    double kappa_mR = 0.0;
    double kappa_Rn = 0.0;

    /// Copy with all path losses divided out (set to 1): the normalized
    /// convention of the closed-form expectation. Scaling re-enters solely
    /// through the pl_* fields.
    ChannelSet normalized() const;
};

/// Amplitude path-loss gain sqrt(C0 * d^-exponent); C0 linear, d >= 1 m.
double path_loss(double d_m, double c0_linear, double exponent);

/// ULA response: element l = exp(j*2*pi*spacing*l*sin(angle)), l = 0..L-1.
CVec ula_steering(int num_elements, double angle_rad, double spacing_wavelengths);

/// Rician draw: pl * (sqrt(k/(1+k)) los + sqrt(1/(1+k)) nlos), NLoS entries
/// i.i.d. CN(0,1). kappa may be +inf (pure LoS).
CVec sample_rician(const CVec& los, double kappa, double pl, std::uint64_t seed);
CVec sample_rician(const CVec& los, double kappa, double pl, std::mt19937_64& rng);

/// h_direct + sum_l h_out[l] * diag[l] * h_in[l].
cplx cascaded_gain(const CVec& h_out, const CVec& diag, const CVec& h_in,
                   cplx h_direct);

/// Synthesizes the full channel set for a scenario. Cascaded hops are Rician
/// with the configured kappa; direct links are Rayleigh (kappa = 0). Each
/// link draws from its own RNG substream, so realizations are deterministic
/// per seed and stable under changes of L, M or N elsewhere. Hop distances
/// are clamped at the 1 m reference distance.
ChannelSet assemble_channels(const Scenario& sc, const ScenarioConfig& cfg,
                             std::uint64_t seed);

/// JSON test-fixture dump: complex entries as [re, im] pairs.
std::string channels_to_json(const ChannelSet& cs);
ChannelSet channels_from_json(const std::string& text);

}  // namespace rics
