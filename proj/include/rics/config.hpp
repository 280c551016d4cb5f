#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rics/common.hpp"

namespace rics {

/// Full experiment configuration. Defaults reproduce the standard deployment:
/// a 500 m circular track, BS at the origin, RICS 80 m away at 30 m height.
struct ScenarioConfig {
    int num_cvs = 10;          // M
    int num_v2v_pairs = 10;    // N
    int num_elements = 30;     // L

    double field_radius = 500.0;           // m, circular track radius
    Vec3 bs_position{0.0, 0.0, 30.0};      // m
    Vec3 rics_position{80.0, 0.0, 30.0};   // m

    double cv_power = 28.0;    // P_m, dBm
    double v2v_power = 23.0;   // P_t, dBm
    double bandwidth = 1e6;    // W, Hz
    double noise_floor = -110.0;  // W*xi0 total noise power, dBm

    double pathloss_ref = -30.0;     // C0 at d0 = 1 m, dB
    double pathloss_exponent = 2.5;
    double rician_factor = 4.0;      // kappa for both cascaded hops

    double task_bits = 15e6;         // s_m, bits
    double cycles_per_bit = 100.0;   // c_m = cycles_per_bit * task_bits
    double local_cpu_min = 1e9;      // f_m lower bound, Hz
    double local_cpu_max = 5e9;      // f_m upper bound, Hz
    double edge_cpu = 1e10;          // F, Hz

    double accuracy_ratio = 0.8;     // lambda
    double edge_accuracy = 0.9;      // A_B(Q)

    double sinr_threshold = 2.0;     // gamma_th, linear
    double outage_cap = 0.01;        // P_outage
    double smooth_param = 1.0;       // omega

    double aioa_tol = 1e-3;          // delta
    double gd_tol = 1e-6;            // epsilon
    double gd_rate = 0.01;           // a, initial gradient step

    double vehicle_density = 0.03;   // vehicles per metre of track

    std::optional<double> max_delay; // sigma_m, reported only, never enforced

    double cv_power_watt() const { return dbm_to_watt(cv_power); }
    double v2v_power_watt() const { return dbm_to_watt(v2v_power); }
    double noise_watt() const { return dbm_to_watt(noise_floor); }
    double pathloss_ref_linear() const { return db_to_linear(pathloss_ref); }
    double task_cycles() const { return cycles_per_bit * task_bits; }
    double rics_bs_distance() const { return distance(bs_position, rics_position); }
};

/// Returns every violated invariant, not just the first. Empty means valid.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

/// Parses a UTF-8 JSON document with exactly the ScenarioConfig field names
/// (snake_case). Missing fields keep their defaults; unknown keys are
/// rejected. Throws ConfigError on malformed input or invalid values.
ScenarioConfig config_from_json(const std::string& json_text);
ScenarioConfig config_from_file(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace rics
