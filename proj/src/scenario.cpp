#include "rics/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rics {

namespace {

constexpr std::uint64_t kScenarioTag = 0x5343454eULL;   // "SCEN"
constexpr int kPlacementRetries = 100;

}  // namespace

std::vector<std::pair<int, int>> pair_v2v(const std::vector<Vec3>& positions) {
    const int n = static_cast<int>(positions.size());
    if (n < 2) throw InsufficientVehicles("pair_v2v needs at least two vehicles");

    std::vector<bool> paired(n, false);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n / 2);
    for (int tx = 0; tx < n; ++tx) {
        if (paired[tx]) continue;
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int rx = tx + 1; rx < n; ++rx) {
            if (paired[rx]) continue;
            const double d = distance(positions[tx], positions[rx]);
            if (d < best_d) {  // strict: lowest index wins ties
                best_d = d;
                best = rx;
            }
        }
        if (best < 0) break;  // odd vehicle left over
        paired[tx] = paired[best] = true;
        pairs.emplace_back(tx, best);
    }
    return pairs;
}

Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    const int needed = cfg.num_cvs + 2 * cfg.num_v2v_pairs;
    const double track_length = 2.0 * kPi * cfg.field_radius;

    auto rng = substream(seed, kScenarioTag);
    std::poisson_distribution<int> count_dist(cfg.vehicle_density * track_length);

    int count = 0;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
        count = count_dist(rng);
        if (count >= needed) {
            placed = true;
            break;
        }
    }
    if (!placed)
        throw PlacementFailure(
            "vehicle_density too low: could not draw " + std::to_string(needed) +
            " vehicles in " + std::to_string(kPlacementRetries) + " attempts");

    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::vector<Vec3> vehicles(count);
    for (auto& v : vehicles) {
        const double phi = angle(rng);
        v = Vec3{cfg.field_radius * std::cos(phi), cfg.field_radius * std::sin(phi), 0.0};
    }

    // CVs chosen uniformly without replacement (partial Fisher-Yates).
    std::vector<int> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < cfg.num_cvs; ++i) {
        std::uniform_int_distribution<int> pick(i, count - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }

    Scenario sc;
    sc.rng_seed = seed;
    sc.cv_positions.reserve(cfg.num_cvs);
    for (int i = 0; i < cfg.num_cvs; ++i) sc.cv_positions.push_back(vehicles[idx[i]]);

    std::vector<int> rest(idx.begin() + cfg.num_cvs, idx.end());
    std::sort(rest.begin(), rest.end());  // greedy order = ascending vehicle index
    std::vector<Vec3> rest_pos;
    rest_pos.reserve(rest.size());
    for (int i : rest) rest_pos.push_back(vehicles[i]);

    const auto pairs = pair_v2v(rest_pos);
    if (static_cast<int>(pairs.size()) < cfg.num_v2v_pairs)
        throw InsufficientVehicles("not enough unpaired vehicles for V2V pairs");
    for (int p = 0; p < cfg.num_v2v_pairs; ++p) {
        sc.v2v_tx_positions.push_back(rest_pos[pairs[p].first]);
        sc.v2v_rx_positions.push_back(rest_pos[pairs[p].second]);
    }

    std::uniform_real_distribution<double> cpu(cfg.local_cpu_min, cfg.local_cpu_max);
    sc.local_cpu.reserve(cfg.num_cvs);
    for (int m = 0; m < cfg.num_cvs; ++m) sc.local_cpu.push_back(cpu(rng));

    return sc;
}

}  // namespace rics
