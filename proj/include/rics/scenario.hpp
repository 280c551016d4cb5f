#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rics/config.hpp"

namespace rics {

/// One realized deployment: vehicle placement, CV selection, V2V pairing and
/// sampled local CPU frequencies. Pure function of (config, seed).
struct Scenario {
    std::vector<Vec3> cv_positions;       // M
    std::vector<Vec3> v2v_tx_positions;   // N
    std::vector<Vec3> v2v_rx_positions;   // N
    std::vector<double> local_cpu;        // f_m, Hz, M entries
    std::uint64_t rng_seed = 0;
};

/// Greedy nearest-neighbour pairing in ascending index order: the lowest
/// unpaired index becomes a Tx, its nearest unpaired vehicle (lowest index on
/// ties) becomes the Rx. Pairs all points; throws InsufficientVehicles for
/// fewer than two points.
std::vector<std::pair<int, int>> pair_v2v(const std::vector<Vec3>& positions);

/// Draws a Poisson vehicle count on the circular track, places vehicles
/// uniformly on it, picks M CVs without replacement and forms the first N
/// nearest-neighbour pairs from the rest. Re-draws (bounded) until the count
/// supports M + 2N vehicles; throws PlacementFailure when the density is too
/// low. Deterministic per (cfg, seed).
Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace rics
