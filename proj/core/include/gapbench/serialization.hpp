#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gapbench/env_metrics.hpp"
#include "gapbench/map_gen.hpp"
#include "gapbench/sim.hpp"

namespace gapbench {

// JSON documents. Doubles are written in shortest round-trip form, so
// to_json/from_json reproduce values exactly.

[[nodiscard]] nlohmann::json to_json(const ObstacleMap& map);
[[nodiscard]] ObstacleMap obstacle_map_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const TrialSpec& trial);
[[nodiscard]] TrialSpec trial_spec_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const EnvMetrics& env);
[[nodiscard]] EnvMetrics env_metrics_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const Contact& contact);
[[nodiscard]] Contact contact_from_json(const nlohmann::json& j);

/// Fixed 9-significant-digit rendering used by every table.
[[nodiscard]] std::string format_sig9(double value);

/// Trajectory table: header "t,px,py,pz,vx,vy,vz,ax,ay,az", one row per state.
[[nodiscard]] std::string trajectory_csv(const std::vector<DroneState>& states);
/// Inverse of trajectory_csv (yaw is not stored and reads as 0).
[[nodiscard]] std::vector<DroneState> parse_trajectory_csv(const std::string& text);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// 64-bit FNV-1a, used for config and trial-list fingerprints.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hex64(std::uint64_t value);

}  // namespace gapbench
