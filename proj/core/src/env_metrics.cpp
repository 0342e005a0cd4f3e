#include "gapbench/env_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "gapbench/errors.hpp"
#include "gapbench/log.hpp"

namespace gapbench {

TraversabilityConfig TraversabilityConfig::defaults_for(const Bounds& bounds, double d_drone,
                                                        double altitude) {
    return TraversabilityConfig{bounds.width() / 40.0, 16, altitude, d_drone};
}

void TraversabilityConfig::validate() const {
    if (!(grid_spacing > 0.0)) throw DomainError("traversability grid spacing must be positive");
    if (directions < 4) throw DomainError("traversability needs at least 4 directions");
    if (!(d_drone > 0.0)) throw DomainError("d_drone must be positive");
}

double traversability(const Scene& scene, const TraversabilityConfig& cfg, int* kept_points) {
    cfg.validate();
    const Bounds& b = scene.bounds();
    std::vector<Vec3> headings;
    headings.reserve(static_cast<std::size_t>(cfg.directions));
    for (int j = 0; j < cfg.directions; ++j) {
        const double a = 2.0 * kPi * j / cfg.directions;
        headings.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    const double max_range = std::hypot(b.width(), b.height()) + 1.0;

    // Fixed summation order: rows, columns, headings.
    double sum = 0.0;
    long rays = 0;
    int kept = 0;
    for (int iy = 0;; ++iy) {
        const double y = b.min_y + (iy + 0.5) * cfg.grid_spacing;
        if (y > b.max_y) break;
        for (int ix = 0;; ++ix) {
            const double x = b.min_x + (ix + 0.5) * cfg.grid_spacing;
            if (x > b.max_x) break;
            const Vec3 p(x, y, cfg.altitude);
            if (scene.check_collision(p, cfg.d_drone)) continue;
            ++kept;
            for (const auto& h : headings) {
                sum += scene.ray_cast(p, h, max_range);
                ++rays;
            }
        }
    }
    if (kept_points) *kept_points = kept;
    if (rays == 0) throw DomainError("map fully blocked");
    return sum / (cfg.d_drone * static_cast<double>(rays));
}

double trav_max(const Bounds& bounds, const TraversabilityConfig& cfg) {
    ObstacleMap empty;
    empty.bounds = bounds;
    return traversability(Scene(std::move(empty)), cfg);
}

double normalized_traversability(double trav, double trav_max_value) {
    if (!(trav_max_value > 0.0)) throw DomainError("TRAV_max must be positive");
    if (trav > trav_max_value)
        throw ConsistencyError(fmt::format("TRAV {} exceeds TRAV_max {}", trav, trav_max_value));
    return trav / trav_max_value;
}

double relative_gap_size(double r_poisson, double mean_width, double d_drone) {
    if (!(d_drone > 0.0)) throw DomainError("d_drone must be positive");
    return (r_poisson - mean_width) / d_drone;
}

double mean_obstacle_width(const ObstacleMap& map) {
    if (map.cylinders.empty()) return 0.0;
    // Group by site; cylinders without a site stand alone.
    std::map<int, std::vector<const Cylinder*>> sites;
    std::vector<std::vector<const Cylinder*>> groups;
    for (const auto& c : map.cylinders) {
        if (c.site >= 0) sites[c.site].push_back(&c);
        else groups.push_back({&c});
    }
    for (auto& [site, members] : sites) groups.push_back(std::move(members));
    double total = 0.0;
    for (const auto& members : groups) {
        if (members.size() == 1) {
            total += 2.0 * members.front()->radius;
            continue;
        }
        Vec2 centroid = Vec2::Zero();
        for (const auto* c : members) centroid += c->center;
        centroid /= static_cast<double>(members.size());
        double reach = 0.0;
        for (const auto* c : members) reach = std::max(reach, (c->center - centroid).norm() + c->radius);
        total += 2.0 * reach;
    }
    return total / static_cast<double>(groups.size());
}

EnvMetrics compute_env_metrics(const Scene& scene, const TraversabilityConfig& cfg, double r_poisson) {
    EnvMetrics m;
    m.trav = traversability(scene, cfg, &m.sample_points);
    m.trav_max = trav_max(scene.bounds(), cfg);
    m.p_tau = normalized_traversability(m.trav, m.trav_max);
    m.mean_obstacle_width = mean_obstacle_width(scene.map());
    m.rgs = relative_gap_size(r_poisson, m.mean_obstacle_width, cfg.d_drone);
    int cols = 0;
    for (int ix = 0; scene.bounds().min_x + (ix + 0.5) * cfg.grid_spacing <= scene.bounds().max_x; ++ix) ++cols;
    int rows = 0;
    for (int iy = 0; scene.bounds().min_y + (iy + 0.5) * cfg.grid_spacing <= scene.bounds().max_y; ++iy) ++rows;
    m.skipped_points = rows * cols - m.sample_points;
    if (m.rgs < 1.0) log::warn(fmt::format("relative gap size {:.3f} is below 1", m.rgs));
    return m;
}

}  // namespace gapbench
