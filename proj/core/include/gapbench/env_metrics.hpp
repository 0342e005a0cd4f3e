#pragma once

#include "gapbench/map_gen.hpp"
#include "gapbench/scene.hpp"

namespace gapbench {

struct TraversabilityConfig {
    double grid_spacing = 4.0;
    int directions = 16;
    double altitude = 1.5;
    double d_drone = 0.6;

    /// grid_spacing = bounds width / 40, 16 directions.
    static TraversabilityConfig defaults_for(const Bounds& bounds, double d_drone, double altitude = 1.5);
    void validate() const;
};

struct EnvMetrics {
    double trav = 0.0;
    double trav_max = 0.0;
    double p_tau = 0.0;
    double rgs = 0.0;
    double mean_obstacle_width = 0.0;
    int sample_points = 0;   // grid points kept (not inside an obstacle)
    int skipped_points = 0;  // grid points inside an inflated obstacle
};

/// Mean free-flight ray length over a regular grid of sample points and
/// evenly spaced horizontal headings, divided by d_drone. Points whose drone
/// sphere would collide are skipped. Throws DomainError("map fully blocked")
/// when no point survives.
[[nodiscard]] double traversability(const Scene& scene, const TraversabilityConfig& cfg,
                                    int* kept_points = nullptr);

/// Traversability of the obstacle-free map with the same bounds.
[[nodiscard]] double trav_max(const Bounds& bounds, const TraversabilityConfig& cfg);

/// TRAV / TRAV_max. Throws ConsistencyError if TRAV exceeds TRAV_max.
[[nodiscard]] double normalized_traversability(double trav, double trav_max);

/// (r_poisson - mean_width) / d_drone.
[[nodiscard]] double relative_gap_size(double r_poisson, double mean_width, double d_drone);

/// Mean width over obstacles: a single cylinder counts its diameter, a
/// multi-cylinder site counts the diameter of the smallest circle centred at
/// the member centroid that encloses every member.
[[nodiscard]] double mean_obstacle_width(const ObstacleMap& map);

/// All of the above for one generated map. Flags (log::warn) RGS < 1.
[[nodiscard]] EnvMetrics compute_env_metrics(const Scene& scene, const TraversabilityConfig& cfg,
                                             double r_poisson);

}  // namespace gapbench
