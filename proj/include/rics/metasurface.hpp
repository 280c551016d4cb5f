#pragma once

#include <utility>

#include "rics/common.hpp"

namespace rics {

/// Free-space constants and the GRIN-MS-GRIN defaults (3 um design
/// wavelength, MS thickness lambda/3, 10-wavelength aperture, 35 um GRIN
/// characteristic length). The transfer-function relations take a
/// dimensional width inside a logarithm; widths are normalized by the 1 um
/// unit below, so the calculator is deterministic and reversible.
namespace metasurface_defaults {
inline constexpr double kEps0 = 8.85e-12;          // F/m
inline constexpr double kMu0 = 4.0 * kPi * 1e-7;   // H/m
inline constexpr double kLambda = 3e-6;            // m
inline constexpr double kDelta = kLambda / 3.0;    // MS thickness, m
inline constexpr double kK0 = 2.0 * kPi / kLambda; // rad/m
inline constexpr double kWidthUnit = 1e-6;         // m, width normalization
inline constexpr double kGrinWidth = 10.0 * kLambda;          // m
inline constexpr double kGrinWidthNorm = kGrinWidth / kWidthUnit;  // = 30
inline constexpr double kGrinLength = 35e-6;       // m
inline constexpr double kEpsCenter = 2.01 * kEps0; // F/m
inline constexpr double kLossCap = 100.0;          // |Im(eps_ms/eps0)| cap
}  // namespace metasurface_defaults

/// Material solution for one amplitude factor. eps_ratio is eps_ms/eps0
/// (= mu_ms/mu0 under impedance matching), purely imaginary for real psi.
struct MaterialSpec {
    cplx eps_ratio;
    double delta = metasurface_defaults::kDelta;
    double k0 = metasurface_defaults::kK0;
    double grin_width_norm = metasurface_defaults::kGrinWidthNorm;
    double grin_length = metasurface_defaults::kGrinLength;
    double eps_center = metasurface_defaults::kEpsCenter;
    bool feasible = false;
};

/// GRIN permittivity eps_c * (1 - (pi/(2 L_g))^2 y^2) at transverse offset y.
/// Throws OutOfAperture when |y| exceeds the half-aperture.
double grin_permittivity(double y_m, double eps_center, double grin_length,
                         double half_aperture = metasurface_defaults::kGrinWidth / 2.0);

/// Transfer-function gain G = 2/(psi * W); W in normalized width units.
double transfer_gain(double psi, double grin_width_norm);

/// Inverts the attenuation relation: eps_ms/eps0 = j/(k0*Delta) *
/// (ln(psi * W) - ln 2), W in normalized width units.
/// feasible iff |Im(eps_ratio)| <= loss_cap.
MaterialSpec ms_material(double psi, double delta, double k0,
                         double grin_width_norm,
                         double loss_cap = metasurface_defaults::kLossCap);

/// Closed-form feasible interval for psi:
/// [2/W * e^{-k0*Delta*loss_cap}, 2/W * e^{+k0*Delta*loss_cap}].
std::pair<double, double> feasible_psi_range(double delta, double k0,
                                             double grin_width_norm,
                                             double loss_cap);

}  // namespace rics
