#include "gapbench/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "gapbench/baselines.hpp"
#include "gapbench/errors.hpp"
#include "gapbench/serialization.hpp"

namespace gapbench {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, std::string_view where) {
    if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!keys.contains(k)) throw ConfigError(fmt::format("unknown key '{}' in {}", k, where));
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_range(const json& j, const char* key, std::pair<double, double>& out) {
    if (!j.contains(key)) return;
    const json& r = j.at(key);
    if (!r.is_array() || r.size() != 2) throw ConfigError(fmt::format("'{}' must be [lo, hi]", key));
    out = {r.at(0).get<double>(), r.at(1).get<double>()};
}

json range(const std::pair<double, double>& r) { return json::array({r.first, r.second}); }

}  // namespace

double CampaignConfig::effective_traversability_spacing() const {
    return traversability_spacing.value_or(map_template.bounds.width() / 40.0);
}

double CampaignConfig::effective_oracle_cell_size() const { return oracle_cell_size.value_or(drone.d_drone / 3.0); }

TrialConstraints CampaignConfig::trial_constraints() const {
    return TrialConstraints{d_lo, d_hi, max_time, altitude, drone.d_drone};
}

void CampaignConfig::validate() const {
    if (maps < 1 || trials_per_map < 1) throw ConfigError("maps and trials_per_map must be at least 1");
    if (bins < 2) throw ConfigError("bins must be at least 2");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (!(r_poisson_range.first > 0.0) || r_poisson_range.second < r_poisson_range.first)
        throw ConfigError("r_poisson_range must be positive and ordered");
    if (!(d_lo > 0.0) || d_hi < d_lo) throw ConfigError("trial distance range must be positive and ordered");
    if (!(max_time > 0.0) || !(goal_tolerance > 0.0) || !(dt > 0.0) || !(watchdog > 0.0))
        throw ConfigError("max_time, goal_tolerance, dt and watchdog must be positive");
    if (traversability_directions < 4) throw ConfigError("traversability_directions must be at least 4");
    if (!(effective_traversability_spacing() > 0.0) || !(effective_oracle_cell_size() > 0.0))
        throw ConfigError("traversability spacing and oracle cell size must be positive");
    if (!(max_fault_fraction >= 0.0 && max_fault_fraction <= 1.0)) throw ConfigError("max_fault_fraction must lie in [0, 1]");
    try {
        drone.validate();
        camera.validate();
        // The densest map in the range must still have a relative gap size of at least 1.
        MapSpec densest = map_template;
        densest.r_poisson = r_poisson_range.first;
        densest.d_drone = drone.d_drone;
        densest.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
    std::set<std::string> names;
    for (const auto& a : algorithms) {
        if (a.name.empty()) throw ConfigError("algorithm name must not be empty");
        if (a.name.find_first_of("/\\,\"") != std::string::npos) throw ConfigError("algorithm name contains a reserved character");
        if (!names.insert(a.name).second) throw ConfigError(fmt::format("duplicate algorithm name '{}'", a.name));
        if (!a.builtin.empty()) {
            try {
                (void)builtin_algorithm(a.builtin);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        } else {
            if (a.transport != "stdio" && a.transport != "unix") throw ConfigError("transport must be 'stdio' or 'unix'");
            if (a.transport == "stdio" && a.command.empty()) throw ConfigError(fmt::format("algorithm '{}' needs a command", a.name));
            if (a.transport == "unix" && a.endpoint.empty()) throw ConfigError(fmt::format("algorithm '{}' needs an endpoint", a.name));
        }
    }
}

CampaignConfig config_from_json(const json& j) {
    CampaignConfig c;
    try {
        only_keys(j, {"maps", "trials_per_map", "master_seed", "bins", "output_dir", "workers", "map", "drone", "camera",
                      "trial", "sim", "metrics", "max_fault_fraction", "algorithms"},
                  "config");
        read(j, "maps", c.maps);
        read(j, "trials_per_map", c.trials_per_map);
        read(j, "master_seed", c.master_seed);
        read(j, "bins", c.bins);
        read(j, "output_dir", c.output_dir);
        read(j, "workers", c.workers);
        read(j, "max_fault_fraction", c.max_fault_fraction);
        if (j.contains("map")) {
            const json& m = j.at("map");
            only_keys(m, {"bounds", "r_poisson_range", "style", "cluster_ratio", "obstacle_radius_range",
                          "cluster_radius_range", "obstacle_height_range"},
                      "map");
            if (m.contains("bounds")) {
                const json& b = m.at("bounds");
                if (!b.is_array() || b.size() != 4) throw ConfigError("map.bounds must be [min_x, min_y, max_x, max_y]");
                c.map_template.bounds = Bounds{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
            }
            read_range(m, "r_poisson_range", c.r_poisson_range);
            if (m.contains("style")) c.map_template.style = map_style_from_string(m.at("style").get<std::string>());
            read(m, "cluster_ratio", c.map_template.cluster_ratio);
            read_range(m, "obstacle_radius_range", c.map_template.obstacle_radius_range);
            read_range(m, "cluster_radius_range", c.map_template.cluster_radius_range);
            read_range(m, "obstacle_height_range", c.map_template.obstacle_height_range);
        }
        if (j.contains("drone")) {
            const json& d = j.at("drone");
            only_keys(d, {"d_drone", "v_max", "a_max", "velocity_time_constant"}, "drone");
            read(d, "d_drone", c.drone.d_drone);
            read(d, "v_max", c.drone.v_max);
            read(d, "a_max", c.drone.a_max);
            read(d, "velocity_time_constant", c.drone.velocity_time_constant);
        }
        if (j.contains("camera")) {
            const json& cam = j.at("camera");
            only_keys(cam, {"width", "height", "horizontal_fov", "max_range", "rate"}, "camera");
            read(cam, "width", c.camera.width);
            read(cam, "height", c.camera.height);
            read(cam, "horizontal_fov", c.camera.horizontal_fov);
            read(cam, "max_range", c.camera.max_range);
            read(cam, "rate", c.camera.rate);
        }
        if (j.contains("trial")) {
            const json& t = j.at("trial");
            only_keys(t, {"d_lo", "d_hi", "max_time", "goal_tolerance", "altitude"}, "trial");
            read(t, "d_lo", c.d_lo);
            read(t, "d_hi", c.d_hi);
            read(t, "max_time", c.max_time);
            read(t, "goal_tolerance", c.goal_tolerance);
            read(t, "altitude", c.altitude);
        }
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            only_keys(s, {"dt", "watchdog", "handshake_timeout"}, "sim");
            read(s, "dt", c.dt);
            read(s, "watchdog", c.watchdog);
            read(s, "handshake_timeout", c.handshake_timeout);
        }
        if (j.contains("metrics")) {
            const json& m = j.at("metrics");
            only_keys(m, {"traversability_spacing", "traversability_directions", "oracle_cell_size", "exclude_faults"}, "metrics");
            if (m.contains("traversability_spacing") && !m.at("traversability_spacing").is_null())
                c.traversability_spacing = m.at("traversability_spacing").get<double>();
            read(m, "traversability_directions", c.traversability_directions);
            if (m.contains("oracle_cell_size") && !m.at("oracle_cell_size").is_null())
                c.oracle_cell_size = m.at("oracle_cell_size").get<double>();
            read(m, "exclude_faults", c.exclude_faults);
        }
        if (j.contains("algorithms")) {
            c.algorithms.clear();
            for (const auto& a : j.at("algorithms")) {
                only_keys(a, {"name", "builtin", "command", "transport", "endpoint"}, "algorithm");
                AlgorithmSpec spec;
                read(a, "name", spec.name);
                read(a, "builtin", spec.builtin);
                read(a, "command", spec.command);
                read(a, "transport", spec.transport);
                read(a, "endpoint", spec.endpoint);
                if (spec.name.empty()) spec.name = spec.builtin;
                c.algorithms.push_back(std::move(spec));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    } catch (const GenerationError& e) {
        throw ConfigError(e.what());
    }
    c.map_template.d_drone = c.drone.d_drone;
    c.validate();
    return c;
}

CampaignConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
    return config_from_json(j);
}

json to_json(const CampaignConfig& c) {
    json algorithms = json::array();
    for (const auto& a : c.algorithms) {
        json entry = {{"name", a.name}};
        if (!a.builtin.empty()) {
            entry["builtin"] = a.builtin;
        } else {
            entry["command"] = a.command;
            entry["transport"] = a.transport;
            if (!a.endpoint.empty()) entry["endpoint"] = a.endpoint;
        }
        algorithms.push_back(std::move(entry));
    }
    const auto& m = c.map_template;
    return {
        {"maps", c.maps},
        {"trials_per_map", c.trials_per_map},
        {"master_seed", c.master_seed},
        {"bins", c.bins},
        {"output_dir", c.output_dir},
        {"workers", c.workers},
        {"max_fault_fraction", c.max_fault_fraction},
        {"map", {{"bounds", json::array({m.bounds.min_x, m.bounds.min_y, m.bounds.max_x, m.bounds.max_y})},
                 {"r_poisson_range", range(c.r_poisson_range)},
                 {"style", std::string(to_string(m.style))},
                 {"cluster_ratio", m.cluster_ratio},
                 {"obstacle_radius_range", range(m.obstacle_radius_range)},
                 {"cluster_radius_range", range(m.cluster_radius_range)},
                 {"obstacle_height_range", range(m.obstacle_height_range)}}},
        {"drone", {{"d_drone", c.drone.d_drone}, {"v_max", c.drone.v_max}, {"a_max", c.drone.a_max},
                   {"velocity_time_constant", c.drone.velocity_time_constant}}},
        {"camera", {{"width", c.camera.width}, {"height", c.camera.height}, {"horizontal_fov", c.camera.horizontal_fov},
                    {"max_range", c.camera.max_range}, {"rate", c.camera.rate}}},
        {"trial", {{"d_lo", c.d_lo}, {"d_hi", c.d_hi}, {"max_time", c.max_time}, {"goal_tolerance", c.goal_tolerance},
                   {"altitude", c.altitude}}},
        {"sim", {{"dt", c.dt}, {"watchdog", c.watchdog}, {"handshake_timeout", c.handshake_timeout}}},
        {"metrics", {{"traversability_spacing", c.effective_traversability_spacing()},
                     {"traversability_directions", c.traversability_directions},
                     {"oracle_cell_size", c.effective_oracle_cell_size()},
                     {"exclude_faults", c.exclude_faults}}},
        {"algorithms", std::move(algorithms)},
    };
}

}  // namespace gapbench
