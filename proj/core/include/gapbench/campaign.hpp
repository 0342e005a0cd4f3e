#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapbench/config.hpp"
#include "gapbench/env_metrics.hpp"
#include "gapbench/perf_metrics.hpp"

namespace gapbench {

// Results directory layout:
//   config.json                            normalized config snapshot
//   maps/map_NNN.json                      map, env metrics, planned trials
//   trials/<algorithm>/map_NNN_trial_NNN.csv   trajectory
//   trials/<algorithm>/map_NNN_trial_NNN.json  outcome, timings (written last)
//   metrics.csv, processing.csv, summary.json
//   report/                                tables and plots
namespace store {
[[nodiscard]] std::filesystem::path config_path(const std::filesystem::path& dir);
[[nodiscard]] std::filesystem::path map_path(const std::filesystem::path& dir, int map);
[[nodiscard]] std::filesystem::path trajectory_path(const std::filesystem::path& dir, std::string_view algorithm,
                                                    int map, int trial);
[[nodiscard]] std::filesystem::path trial_meta_path(const std::filesystem::path& dir, std::string_view algorithm,
                                                    int map, int trial);
}  // namespace store

struct PlannedTrial {
    int index = 0;
    std::uint64_t trial_id = 0;
    TrialSpec spec;
    double d_min = 0.0;
    int replacements = 0;  // unreachable draws discarded before this one
};

struct MapRecord {
    int index = 0;
    std::uint64_t map_seed = 0;
    double r_poisson = 0.0;
    MapStyle style = MapStyle::IndoorCylinders;
    ObstacleMap map;
    EnvMetrics env;
    std::vector<PlannedTrial> trials;
};

[[nodiscard]] nlohmann::json to_json(const MapRecord& record);
[[nodiscard]] MapRecord map_record_from_json(const nlohmann::json& j);

/// Map m of a campaign: seed, r_poisson draw, generation, env metrics and
/// trials with oracle distances. Unreachable trials are redrawn and counted.
[[nodiscard]] MapRecord plan_map(const CampaignConfig& config, int m);

struct CampaignOptions {
    std::function<void(std::string_view)> progress;
    /// Stop after this many newly executed trials; 0 runs everything.
    std::size_t max_new_trials = 0;
};

struct CampaignResult {
    std::filesystem::path output_dir;
    std::size_t trials_total = 0;
    std::size_t trials_run = 0;
    std::size_t trials_skipped = 0;  // already persisted by an earlier run
    std::size_t faults = 0;
    bool complete = false;

    [[nodiscard]] double fault_fraction() const {
        return trials_total == 0 ? 0.0 : static_cast<double>(faults) / static_cast<double>(trials_total);
    }
};

/// Generates or reloads maps, executes every missing (algorithm, map, trial)
/// on a worker pool, persists each trial, then writes metrics and summary.
/// Throws ConfigError when the output directory holds a different campaign.
CampaignResult run_campaign(const CampaignConfig& config, const CampaignOptions& options = {});

struct TrialResult {
    int map = 0;
    int trial = 0;
    std::string identity;
    TrialMetrics metrics;
    std::string fault;
    std::vector<double> processing;
    std::vector<std::optional<double>> self_reported;
};

/// Everything a complete results directory holds, read back from disk.
struct CampaignData {
    std::filesystem::path dir;
    CampaignConfig config;
    std::string config_hash;
    std::vector<MapRecord> maps;
    std::vector<std::vector<TrialResult>> results;  // [algorithm][map * trials_per_map + trial]
    std::vector<std::string> trial_list_hashes;     // per algorithm
};

/// Throws std::runtime_error("incomplete campaign: ...") when a trial is missing.
[[nodiscard]] CampaignData load_campaign(const std::filesystem::path& dir);
[[nodiscard]] nlohmann::json summarize(const CampaignData& data);
/// Rewrites metrics.csv, processing.csv and summary.json from persisted trials.
nlohmann::json recompute_metrics(const std::filesystem::path& dir);

}  // namespace gapbench
