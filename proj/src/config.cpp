#include "rics/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rics {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
    std::vector<std::string> errors;
    auto require = [&](bool ok, const char* msg) {
        if (!ok) errors.emplace_back(msg);
    };

    require(cfg.num_cvs >= 1, "num_cvs >= 1");
    require(cfg.num_v2v_pairs >= 1, "num_v2v_pairs >= 1");
    require(cfg.num_elements >= 1, "num_elements >= 1");
    require(finite(cfg.cv_power), "cv_power finite");
    require(finite(cfg.v2v_power), "v2v_power finite");
    require(finite(cfg.noise_floor), "noise_floor finite");
    require(cfg.accuracy_ratio >= 0.0 && cfg.accuracy_ratio <= 1.0,
            "accuracy_ratio in [0,1]");
    require(cfg.edge_accuracy >= 0.0 && cfg.edge_accuracy <= 1.0,
            "edge_accuracy in [0,1]");
    require(cfg.outage_cap > 0.0 && cfg.outage_cap < 0.5,
            "outage_cap in (0,0.5)");
    require(cfg.local_cpu_min > 0.0 && cfg.local_cpu_min <= cfg.local_cpu_max,
            "local_cpu_range [f_min,f_max] with 0 < f_min <= f_max");
    require(cfg.cycles_per_bit > 0.0, "cycles_per_bit > 0");
    require(cfg.field_radius > 0.0 && finite(cfg.field_radius),
            "field_radius > 0");
    require(cfg.bandwidth > 0.0 && finite(cfg.bandwidth), "bandwidth > 0");
    require(cfg.task_bits > 0.0, "task_bits > 0");
    require(cfg.edge_cpu > 0.0, "edge_cpu > 0");
    require(cfg.pathloss_exponent >= 0.0 && finite(cfg.pathloss_exponent),
            "pathloss_exponent >= 0");
    require(finite(cfg.pathloss_ref), "pathloss_ref finite");
    require(cfg.rician_factor >= 0.0, "rician_factor >= 0");
    require(cfg.sinr_threshold > 0.0 && finite(cfg.sinr_threshold),
            "sinr_threshold > 0");
    require(cfg.smooth_param > 0.0 && finite(cfg.smooth_param),
            "smooth_param > 0");
    require(cfg.aioa_tol > 0.0, "aioa_tol > 0");
    require(cfg.gd_tol > 0.0, "gd_tol > 0");
    require(cfg.gd_rate > 0.0, "gd_rate > 0");
    require(cfg.vehicle_density > 0.0, "vehicle_density > 0");
    if (cfg.max_delay) require(*cfg.max_delay > 0.0, "max_delay > 0");
    return errors;
}

namespace {

using nlohmann::json;

Vec3 vec3_from_json(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(key + " must be a [x,y,z] array");
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "num_cvs", "num_v2v_pairs", "num_elements", "field_radius",
        "bs_position", "rics_position", "cv_power", "v2v_power", "bandwidth",
        "noise_floor", "pathloss_ref", "pathloss_exponent", "rician_factor",
        "task_bits", "cycles_per_bit", "local_cpu_range", "edge_cpu",
        "accuracy_ratio", "edge_accuracy", "sinr_threshold", "outage_cap",
        "smooth_param", "aioa_tol", "gd_tol", "gd_rate", "vehicle_density",
        "max_delay"};
    return keys;
}

}  // namespace

ScenarioConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    for (const auto& [key, _] : j.items()) {
        if (!known_keys().count(key))
            throw ConfigError("unknown config key: " + key);
    }

    ScenarioConfig cfg;
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j[key].template get<std::decay_t<decltype(field)>>();
        };
        get("num_cvs", cfg.num_cvs);
        get("num_v2v_pairs", cfg.num_v2v_pairs);
        get("num_elements", cfg.num_elements);
        get("field_radius", cfg.field_radius);
        if (j.contains("bs_position"))
            cfg.bs_position = vec3_from_json(j["bs_position"], "bs_position");
        if (j.contains("rics_position"))
            cfg.rics_position = vec3_from_json(j["rics_position"], "rics_position");
        get("cv_power", cfg.cv_power);
        get("v2v_power", cfg.v2v_power);
        get("bandwidth", cfg.bandwidth);
        get("noise_floor", cfg.noise_floor);
        get("pathloss_ref", cfg.pathloss_ref);
        get("pathloss_exponent", cfg.pathloss_exponent);
        get("rician_factor", cfg.rician_factor);
        get("task_bits", cfg.task_bits);
        get("cycles_per_bit", cfg.cycles_per_bit);
        if (j.contains("local_cpu_range")) {
            const auto& r = j["local_cpu_range"];
            if (!r.is_array() || r.size() != 2)
                throw ConfigError("local_cpu_range must be [f_min, f_max]");
            cfg.local_cpu_min = r[0].get<double>();
            cfg.local_cpu_max = r[1].get<double>();
        }
        get("edge_cpu", cfg.edge_cpu);
        get("accuracy_ratio", cfg.accuracy_ratio);
        get("edge_accuracy", cfg.edge_accuracy);
        get("sinr_threshold", cfg.sinr_threshold);
        get("outage_cap", cfg.outage_cap);
        get("smooth_param", cfg.smooth_param);
        get("aioa_tol", cfg.aioa_tol);
        get("gd_tol", cfg.gd_tol);
        get("gd_rate", cfg.gd_rate);
        get("vehicle_density", cfg.vehicle_density);
        if (j.contains("max_delay")) cfg.max_delay = j["max_delay"].get<double>();
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }

    const auto errors = validate_config(cfg);
    if (!errors.empty()) {
        std::ostringstream oss;
        oss << "invalid config:";
        for (const auto& e : errors) oss << " [" << e << "]";
        throw ConfigError(oss.str());
    }
    return cfg;
}

ScenarioConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return config_from_json(oss.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
    json j;
    j["num_cvs"] = cfg.num_cvs;
    j["num_v2v_pairs"] = cfg.num_v2v_pairs;
    j["num_elements"] = cfg.num_elements;
    j["field_radius"] = cfg.field_radius;
    j["bs_position"] = {cfg.bs_position.x, cfg.bs_position.y, cfg.bs_position.z};
    j["rics_position"] = {cfg.rics_position.x, cfg.rics_position.y, cfg.rics_position.z};
    j["cv_power"] = cfg.cv_power;
    j["v2v_power"] = cfg.v2v_power;
    j["bandwidth"] = cfg.bandwidth;
    j["noise_floor"] = cfg.noise_floor;
    j["pathloss_ref"] = cfg.pathloss_ref;
    j["pathloss_exponent"] = cfg.pathloss_exponent;
    j["rician_factor"] = cfg.rician_factor;
    j["task_bits"] = cfg.task_bits;
    j["cycles_per_bit"] = cfg.cycles_per_bit;
    j["local_cpu_range"] = {cfg.local_cpu_min, cfg.local_cpu_max};
    j["edge_cpu"] = cfg.edge_cpu;
    j["accuracy_ratio"] = cfg.accuracy_ratio;
    j["edge_accuracy"] = cfg.edge_accuracy;
    j["sinr_threshold"] = cfg.sinr_threshold;
    j["outage_cap"] = cfg.outage_cap;
    j["smooth_param"] = cfg.smooth_param;
    j["aioa_tol"] = cfg.aioa_tol;
    j["gd_tol"] = cfg.gd_tol;
    j["gd_rate"] = cfg.gd_rate;
    j["vehicle_density"] = cfg.vehicle_density;
    if (cfg.max_delay) j["max_delay"] = *cfg.max_delay;
    return j.dump(2);
}

}  // namespace rics
