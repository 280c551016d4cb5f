#include "rics/metasurface.hpp"

#include <cmath>

namespace rics {

double grin_permittivity(double y_m, double eps_center, double grin_length,
                         double half_aperture) {
    if (std::fabs(y_m) > half_aperture)
        throw OutOfAperture("grin_permittivity: |y| beyond the GRIN aperture");
    const double k = kPi / (2.0 * grin_length);
    return eps_center * (1.0 - k * k * y_m * y_m);
}

double transfer_gain(double psi, double grin_width_norm) {
    if (psi <= 0.0) throw DomainError("transfer_gain: psi must be positive");
    return 2.0 / (psi * grin_width_norm);
}

MaterialSpec ms_material(double psi, double delta, double k0,
                         double grin_width_norm, double loss_cap) {
    if (psi <= 0.0) throw DomainError("ms_material: psi must be positive");
    MaterialSpec spec;
    spec.delta = delta;
    spec.k0 = k0;
    spec.grin_width_norm = grin_width_norm;
    spec.eps_ratio =
        cplx(0.0, (std::log(psi * grin_width_norm) - std::log(2.0)) / (k0 * delta));
    spec.feasible = std::fabs(spec.eps_ratio.imag()) <= loss_cap;
    return spec;
}

std::pair<double, double> feasible_psi_range(double delta, double k0,
                                             double grin_width_norm,
                                             double loss_cap) {
    const double center = 2.0 / grin_width_norm;
    const double spread = k0 * delta * loss_cap;
    return {center * std::exp(-spread), center * std::exp(spread)};
}

}  // namespace rics
