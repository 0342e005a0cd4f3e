#include "gapbench/map_gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "gapbench/errors.hpp"
#include "gapbench/rng.hpp"
#include "gapbench/scene.hpp"

namespace gapbench {

std::string_view to_string(MapStyle style) {
    return style == MapStyle::IndoorCylinders ? "indoor-cylinders" : "outdoor-clusters";
}

MapStyle map_style_from_string(std::string_view name) {
    if (name == "indoor-cylinders" || name == "indoor") return MapStyle::IndoorCylinders;
    if (name == "outdoor-clusters" || name == "outdoor") return MapStyle::OutdoorClusters;
    throw GenerationError(fmt::format("unknown map style '{}'", name));
}

double MapSpec::implied_mean_width() const {
    const double single = obstacle_radius_range.first + obstacle_radius_range.second;
    if (style == MapStyle::IndoorCylinders) return single;
    // Cluster width: members are centred within r_poisson/4 of the site.
    const double cluster = 2.0 * (0.25 * r_poisson +
                                  0.5 * (cluster_radius_range.first + cluster_radius_range.second));
    return (1.0 - cluster_ratio) * single + cluster_ratio * cluster;
}

void MapSpec::validate() const {
    auto ordered = [](const std::pair<double, double>& r) { return r.first > 0.0 && r.second >= r.first; };
    if (!bounds.valid()) throw GenerationError("map bounds are empty");
    if (!(r_poisson > 0.0)) throw GenerationError("r_poisson must be positive");
    if (!(d_drone > 0.0)) throw GenerationError("d_drone must be positive");
    if (!ordered(obstacle_radius_range) || !ordered(cluster_radius_range) || !ordered(obstacle_height_range))
        throw GenerationError("radius and height ranges must be positive and ordered");
    if (!(cluster_ratio >= 0.0 && cluster_ratio <= 1.0))
        throw GenerationError("cluster_ratio must lie in [0, 1]");
    if ((r_poisson - implied_mean_width()) / d_drone < 1.0)
        throw GenerationError("relative gap size below 1");
}

std::vector<Vec2> poisson_disc_sample(const Bounds& bounds, double r, std::uint64_t seed) {
    if (!(r > 0.0)) throw GenerationError("r_poisson must be positive");
    Rng rng(seed);
    const double cell = r / std::sqrt(2.0);
    const int gw = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell)));
    const int gh = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell)));
    std::vector<int> grid(static_cast<std::size_t>(gw) * static_cast<std::size_t>(gh), -1);
    auto cell_of = [&](const Vec2& p) {
        const int cx = std::min(gw - 1, static_cast<int>((p.x() - bounds.min_x) / cell));
        const int cy = std::min(gh - 1, static_cast<int>((p.y() - bounds.min_y) / cell));
        return std::pair{cx, cy};
    };

    std::vector<Vec2> points;
    std::vector<std::size_t> active;
    auto add = [&](const Vec2& p) {
        const auto [cx, cy] = cell_of(p);
        grid[static_cast<std::size_t>(cy) * static_cast<std::size_t>(gw) + static_cast<std::size_t>(cx)] = static_cast<int>(points.size());
        active.push_back(points.size());
        points.push_back(p);
    };
    auto far_enough = [&](const Vec2& p) {
        const auto [cx, cy] = cell_of(p);
        for (int y = std::max(0, cy - 2); y <= std::min(gh - 1, cy + 2); ++y) {
            for (int x = std::max(0, cx - 2); x <= std::min(gw - 1, cx + 2); ++x) {
                const int idx = grid[static_cast<std::size_t>(y) * static_cast<std::size_t>(gw) + static_cast<std::size_t>(x)];
                if (idx >= 0 && (points[static_cast<std::size_t>(idx)] - p).squaredNorm() < r * r) return false;
            }
        }
        return true;
    };

    add(Vec2(rng.uniform(bounds.min_x, bounds.max_x), rng.uniform(bounds.min_y, bounds.max_y)));
    while (!active.empty()) {
        const std::size_t slot = rng.below(active.size());
        const Vec2 base = points[active[slot]];
        bool placed = false;
        for (int k = 0; k < kBridsonAttempts; ++k) {
            // Uniform by area over the annulus [r, 2r].
            const double rho = r * std::sqrt(1.0 + 3.0 * rng.uniform());
            const double theta = 2.0 * kPi * rng.uniform();
            const Vec2 cand = base + rho * Vec2(std::cos(theta), std::sin(theta));
            if (!bounds.contains(cand) || !far_enough(cand)) continue;
            add(cand);
            placed = true;
            break;
        }
        if (!placed) {
            active[slot] = active.back();
            active.pop_back();
        }
    }

    // Lattice sweep: any lattice point the randomized pass left uncovered becomes a sample.
    const double step = r / kGapFillDivisions;
    const int nx = static_cast<int>(std::floor(bounds.width() / step));
    const int ny = static_cast<int>(std::floor(bounds.height() / step));
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            const Vec2 p(std::min(bounds.max_x, bounds.min_x + ix * step), std::min(bounds.max_y, bounds.min_y + iy * step));
            if (far_enough(p)) add(p);
        }
    }
    return points;
}

namespace {

Vec2 clamp_to(const Bounds& b, const Vec2& p) {
    return {std::clamp(p.x(), b.min_x, b.max_x), std::clamp(p.y(), b.min_y, b.max_y)};
}

}  // namespace

ObstacleMap generate_map(const MapSpec& spec) {
    spec.validate();
    ObstacleMap map;
    map.bounds = spec.bounds;
    map.map_seed = spec.map_seed;
    const auto sites = poisson_disc_sample(spec.bounds, spec.r_poisson,
                                           derive_seed(spec.map_seed, Stream::PoissonSites));
    Rng rng(derive_seed(spec.map_seed, Stream::Obstacles));
    const auto [h_lo, h_hi] = spec.obstacle_height_range;

    for (std::size_t s = 0; s < sites.size(); ++s) {
        const int site = static_cast<int>(s);
        const bool cluster = spec.style == MapStyle::OutdoorClusters && rng.bernoulli(spec.cluster_ratio);
        if (!cluster) {
            const double radius = rng.uniform(spec.obstacle_radius_range.first, spec.obstacle_radius_range.second);
            map.cylinders.push_back({sites[s], radius, rng.uniform(h_lo, h_hi), site});
            continue;
        }
        // Cluster of 3-7 overlapping cylinders centred within r_poisson/4 of the site.
        const int members = 3 + static_cast<int>(rng.below(5));
        const double spread = 0.25 * spec.r_poisson;
        for (int m = 0; m < members; ++m) {
            const double rho = spread * std::sqrt(rng.uniform());
            const double theta = 2.0 * kPi * rng.uniform();
            const Vec2 center = clamp_to(spec.bounds, sites[s] + rho * Vec2(std::cos(theta), std::sin(theta)));
            const double radius = rng.uniform(spec.cluster_radius_range.first, spec.cluster_radius_range.second);
            map.cylinders.push_back({center, radius, rng.uniform(h_lo, h_hi), site});
        }
    }
    return map;
}

TrialSpec generate_trial(const ObstacleMap& map, std::uint64_t trial_seed,
                         const TrialConstraints& constraints) {
    if (!(constraints.d_lo > 0.0) || constraints.d_hi < constraints.d_lo)
        throw InfeasibleError("infeasible trial constraints");
    const Scene scene(map);
    Rng rng(derive_seed(trial_seed, Stream::TrialSampling));
    // Clearance of d_drone between the drone surface and any obstacle.
    const double probe = 3.0 * constraints.d_drone;
    const Bounds& b = map.bounds;
    for (int attempt = 0; attempt < kTrialAttempts; ++attempt) {
        const Vec3 start(rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y), constraints.altitude);
        const double dist = rng.uniform(constraints.d_lo, constraints.d_hi);
        const double theta = 2.0 * kPi * rng.uniform();
        const Vec3 goal = start + dist * Vec3(std::cos(theta), std::sin(theta), 0.0);
        if (!b.contains(horizontal(goal))) continue;
        if (scene.check_collision(start, probe) || scene.check_collision(goal, probe)) continue;
        return TrialSpec{start, goal, constraints.max_time, trial_seed};
    }
    throw InfeasibleError("infeasible trial constraints");
}

}  // namespace gapbench
