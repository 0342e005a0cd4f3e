#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "gapbench/geometry.hpp"

namespace gapbench {

enum class MapStyle { IndoorCylinders, OutdoorClusters };

[[nodiscard]] std::string_view to_string(MapStyle style);
[[nodiscard]] MapStyle map_style_from_string(std::string_view name);

struct MapSpec {
    Bounds bounds{0.0, 0.0, 160.0, 160.0};
    double r_poisson = 4.0;
    // Radius range of single cylinders (indoor obstacles, outdoor trees).
    std::pair<double, double> obstacle_radius_range{0.2, 0.5};
    // Radius range of the members of an outdoor cluster.
    std::pair<double, double> cluster_radius_range{0.3, 0.9};
    std::pair<double, double> obstacle_height_range{4.0, 8.0};
    MapStyle style = MapStyle::IndoorCylinders;
    double cluster_ratio = 0.4;
    std::uint64_t map_seed = 0;
    double d_drone = 0.6;

    /// Mean obstacle width implied by the radius ranges (see relative_gap_size).
    [[nodiscard]] double implied_mean_width() const;
    /// Throws GenerationError when a field is out of range or the implied
    /// relative gap size is below 1.
    void validate() const;
};

struct TrialConstraints {
    double d_lo = 30.0;
    double d_hi = 60.0;
    double max_time = 60.0;
    double altitude = 1.5;
    double d_drone = 0.6;
};

struct TrialSpec {
    Vec3 start = Vec3::Zero();
    Vec3 goal = Vec3::Zero();
    double max_time = 0.0;
    std::uint64_t trial_seed = 0;

    friend bool operator==(const TrialSpec&, const TrialSpec&) = default;
};

inline constexpr int kBridsonAttempts = 30;
inline constexpr double kGapFillDivisions = 16.0;
inline constexpr int kTrialAttempts = 10'000;

/// Bridson's fast Poisson-disc sampling with a fixed 30 candidates per active
/// point, followed by a lattice sweep (spacing r/16) that adds every lattice
/// point still at least r from all samples. Returns points in generation
/// order; a pure function of its inputs.
[[nodiscard]] std::vector<Vec2> poisson_disc_sample(const Bounds& bounds, double r_poisson,
                                                    std::uint64_t seed);

/// One obstacle (single cylinder or cluster) per Poisson site.
[[nodiscard]] ObstacleMap generate_map(const MapSpec& spec);

/// Rejection-samples a collision-free start/goal pair at flight altitude.
/// Throws InfeasibleError("infeasible trial constraints") after kTrialAttempts.
[[nodiscard]] TrialSpec generate_trial(const ObstacleMap& map, std::uint64_t trial_seed,
                                       const TrialConstraints& constraints);

}  // namespace gapbench
