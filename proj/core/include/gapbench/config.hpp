#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapbench/drone.hpp"
#include "gapbench/map_gen.hpp"

namespace gapbench {

/// One algorithm under test: a built-in baseline, or an external process
/// speaking the wire protocol over stdio or a unix-domain socket.
struct AlgorithmSpec {
    std::string name;
    std::string builtin;               // "straight-line", "hover", "reactive"
    std::vector<std::string> command;  // external: argv; "{endpoint}" is substituted
    std::string transport = "stdio";   // "stdio" | "unix"
    std::string endpoint;              // unix socket path when transport == "unix"

    [[nodiscard]] bool external() const { return builtin.empty(); }
};

struct CampaignConfig {
    int maps = 30;
    int trials_per_map = 30;
    std::uint64_t master_seed = 1;
    int bins = 5;
    std::string output_dir = "results";
    int workers = 1;

    MapSpec map_template;  // r_poisson and map_seed are drawn per map
    std::pair<double, double> r_poisson_range{2.3, 5.8};

    DroneParams drone;
    CameraModel camera;
    double d_lo = 30.0;
    double d_hi = 60.0;
    double max_time = 60.0;
    double goal_tolerance = 1.0;
    double altitude = 1.5;

    double dt = 0.01;
    double watchdog = 1.0;
    double handshake_timeout = 10.0;

    std::optional<double> traversability_spacing;  // default: bounds width / 40
    int traversability_directions = 16;
    std::optional<double> oracle_cell_size;        // default: d_drone / 3
    bool exclude_faults = false;                   // drop faulted trials from the SR denominator
    double max_fault_fraction = 0.25;              // above this `bench run` exits with code 3

    std::vector<AlgorithmSpec> algorithms{AlgorithmSpec{"straight-line", "straight-line", {}, "stdio", ""}};

    /// Throws ConfigError.
    void validate() const;

    [[nodiscard]] double effective_traversability_spacing() const;
    [[nodiscard]] double effective_oracle_cell_size() const;
    [[nodiscard]] TrialConstraints trial_constraints() const;
};

/// Missing keys take their defaults; unknown keys are rejected. Throws ConfigError.
[[nodiscard]] CampaignConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] CampaignConfig load_config(const std::string& path);
/// Complete document with every field, including defaults.
[[nodiscard]] nlohmann::json to_json(const CampaignConfig& config);

}  // namespace gapbench
