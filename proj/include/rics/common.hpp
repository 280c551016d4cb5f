#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rics {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Azimuth of `to` as seen from `from`, in the x-y plane.
inline double azimuth(const Vec3& from, const Vec3& to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Wraps an angle into (0, 2pi].
inline double wrap_angle(double theta) {
    double w = std::fmod(theta, 2.0 * kPi);
    if (w <= 0.0) w += 2.0 * kPi;
    return w;
}

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : SimError { using SimError::SimError; };
struct LengthMismatch : SimError { using SimError::SimError; };
struct PlacementFailure : SimError { using SimError::SimError; };
struct InsufficientVehicles : SimError { using SimError::SimError; };
struct ZeroRateWithOffload : SimError { using SimError::SimError; };
struct DegenerateDelay : SimError { using SimError::SimError; };
struct OutOfAperture : SimError { using SimError::SimError; };
struct UnknownScheme : SimError { using SimError::SimError; };
struct ConfigError : SimError { using SimError::SimError; };

/// Deterministic substream seeding: mixes a master seed with a stream tag and
/// two indices so that independent links never share draws and adding
/// elements/vehicles does not shift unrelated streams.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag,
                                    std::uint64_t i = 0, std::uint64_t j = 0) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(mix(master) ^ tag) ^ (i + 1)) ^ ((j + 1) << 1));
}

inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t i = 0, std::uint64_t j = 0) {
    return std::mt19937_64(substream_seed(master, tag, i, j));
}

/// Circularly-symmetric complex Gaussian with unit total variance.
/// Box-Muller over exactly two engine draws, so every stream consumes a
/// fixed, engine-state-only number of values (no distribution caching).
inline cplx complex_gaussian(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u1 = u01(rng);
    const double u2 = u01(rng);
    if (u1 <= 0.0) u1 = std::numeric_limits<double>::min();
    const double r = std::sqrt(-std::log(u1));  // variance 1/2 per component
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

}  // namespace rics
