#include <cmath>

#include <gtest/gtest.h>

#include "gapbench/env_metrics.hpp"
#include "gapbench/errors.hpp"
#include "gapbench/rng.hpp"
#include "test_support.hpp"

using namespace gapbench;
using gapbench::testkit::cyl;
using gapbench::testkit::make_map;

namespace {

// Mean free-ray length over uniformly random (point, heading) pairs, in drone
// diameters. Points inside an inflated obstacle are redrawn.
double monte_carlo_trav(const Scene& scene, double altitude, double d_drone, int rays, std::uint64_t seed) {
    const Bounds& b = scene.bounds();
    const double range = std::hypot(b.width(), b.height()) + 1.0;
    Rng rng(seed);
    double sum = 0.0;
    for (int i = 0; i < rays;) {
        const Vec3 p(rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y), altitude);
        if (scene.check_collision(p, d_drone)) continue;
        sum += scene.ray_cast(p, testkit::heading(rng.uniform(0.0, 2.0 * kPi)), range);
        ++i;
    }
    return sum / (d_drone * rays);
}

TraversabilityConfig cfg(double spacing, int directions = 16, double d_drone = 0.6) {
    return TraversabilityConfig{spacing, directions, 1.5, d_drone};
}

}  // namespace

TEST(Traversability, EmptyMapEqualsTravMax) {
    const Bounds b{0, 0, 40, 40};
    const Scene scene(make_map(b));
    EXPECT_EQ(traversability(scene, cfg(2.0)), trav_max(b, cfg(2.0)));
}

TEST(Traversability, SingleCylinderMatchesMonteCarlo) {
    const Scene scene(make_map(Bounds{0, 0, 40, 40}, {cyl(20, 20, 2.0)}));
    const double grid = traversability(scene, cfg(2.0));
    const double mc = monte_carlo_trav(scene, 1.5, 0.6, 1'000'000, 17);
    EXPECT_NEAR(grid / mc, 1.0, 0.05) << "grid " << grid << " mc " << mc;
}

TEST(Traversability, RandomMapMatchesMonteCarlo) {
    const Scene scene(testkit::random_map(4, 60, Bounds{0, 0, 40, 40}, 0.2, 0.8, 5.0, 5.0));
    const double grid = traversability(scene, TraversabilityConfig::defaults_for(Bounds{0, 0, 40, 40}, 0.6));
    const double mc = monte_carlo_trav(scene, 1.5, 0.6, 300'000, 3);
    EXPECT_NEAR(grid / mc, 1.0, 0.05) << "grid " << grid << " mc " << mc;
}

TEST(TravMax, GoldenValueForDefaultMap) {
    const Bounds b{0, 0, 160, 160};
    const double value = trav_max(b, cfg(4.0));
    EXPECT_NEAR(value, 126.97717581837536, 1e-9);
    const double mc = monte_carlo_trav(Scene(make_map(b)), 1.5, 0.6, 200'000, 5);
    EXPECT_NEAR(value / mc, 1.0, 0.02);
}

TEST(TravMax, ScalesLinearlyWithSide) {
    const double full = trav_max(Bounds{0, 0, 80, 80}, cfg(2.0));
    const double half = trav_max(Bounds{0, 0, 40, 40}, cfg(1.0));
    EXPECT_GT(full, 0.0);
    EXPECT_NEAR(half / full, 0.5, 1e-12);
}

TEST(TravMax, Deterministic) {
    const Bounds b{0, 0, 50, 30};
    EXPECT_EQ(trav_max(b, cfg(1.5)), trav_max(b, cfg(1.5)));
}

TEST(Traversability, DimensionlessUnderScaling) {
    ObstacleMap map = testkit::random_map(6, 30, Bounds{0, 0, 30, 30}, 0.2, 1.0, 3.0, 3.0);
    ObstacleMap scaled = map;
    scaled.bounds = Bounds{0, 0, 60, 60};
    for (auto& c : scaled.cylinders) {
        c.center *= 2.0;
        c.radius *= 2.0;
        c.height *= 2.0;
    }
    const double a = traversability(Scene(map), TraversabilityConfig{1.5, 16, 1.5, 0.6});
    const double b = traversability(Scene(scaled), TraversabilityConfig{3.0, 16, 3.0, 1.2});
    EXPECT_NEAR(a, b, 1e-12 * a);
}

TEST(Traversability, AddingObstacleAwayFromSamplesNeverIncreases) {
    ObstacleMap map = testkit::random_map(12, 20, Bounds{0, 0, 40, 40}, 0.2, 0.8, 5.0, 5.0);
    const TraversabilityConfig c = cfg(2.0);
    double previous = traversability(Scene(map), c);
    Rng rng(4);
    int added = 0;
    while (added < 15) {
        // Centre on a cell corner with a radius that stays clear of every sample point.
        const Vec2 centre(2.0 * static_cast<double>(rng.below(19) + 1), 2.0 * static_cast<double>(rng.below(19) + 1));
        map.cylinders.push_back(Cylinder{centre, 0.3, 5.0, -1});
        const double next = traversability(Scene(map), c);
        EXPECT_LE(next, previous);
        previous = next;
        ++added;
    }
}

TEST(Traversability, FullyBlocked) {
    const Scene scene(make_map(Bounds{0, 0, 10, 10}, {cyl(5, 5, 20.0)}));
    EXPECT_THROW((void)traversability(scene, cfg(1.0)), DomainError);
}

TEST(Traversability, ConfigValidation) {
    const Scene scene(make_map(Bounds{0, 0, 10, 10}));
    EXPECT_THROW((void)traversability(scene, cfg(0.0)), DomainError);
    EXPECT_THROW((void)traversability(scene, cfg(1.0, 3)), DomainError);
}

TEST(NormalizedTraversability, Ratios) {
    EXPECT_EQ(normalized_traversability(50.0, 50.0), 1.0);
    EXPECT_EQ(normalized_traversability(0.0, 50.0), 0.0);
    EXPECT_NEAR(normalized_traversability(0.37 * 80.0, 80.0), 0.37, 1e-15);
    EXPECT_THROW((void)normalized_traversability(51.0, 50.0), ConsistencyError);
}

TEST(RelativeGapSize, Arithmetic) {
    EXPECT_NEAR(relative_gap_size(3.0, 0.6, 0.6), 4.0, 1e-12);
    EXPECT_NEAR(relative_gap_size(2.3, 0.7, 0.6), 1.6 / 0.6, 1e-12);
    EXPECT_NEAR(relative_gap_size(2.3, 0.7, 0.6), 2.667, 1e-3);
}

TEST(MeanObstacleWidth, CylindersAndClusters) {
    ObstacleMap map = make_map(Bounds{0, 0, 20, 20});
    map.cylinders = {Cylinder{Vec2(2, 2), 0.5, 3, 0}, Cylinder{Vec2(8, 8), 0.3, 3, 1}};
    EXPECT_NEAR(mean_obstacle_width(map), 0.8, 1e-15);
    // Cluster: members at (14,10) and (16,10) r = 0.5; centroid (15,10), enclosing radius 1.5.
    map.cylinders.push_back(Cylinder{Vec2(14, 10), 0.5, 3, 2});
    map.cylinders.push_back(Cylinder{Vec2(16, 10), 0.5, 3, 2});
    EXPECT_NEAR(mean_obstacle_width(map), (1.0 + 0.6 + 3.0) / 3.0, 1e-15);
    EXPECT_EQ(mean_obstacle_width(make_map(Bounds{0, 0, 1, 1})), 0.0);
}

TEST(EnvMetrics, DenserMapHasLowerTraversability) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        MapSpec dense;
        dense.r_poisson = 2.3;
        dense.map_seed = seed;
        MapSpec sparse = dense;
        sparse.r_poisson = 5.8;
        const auto tc = TraversabilityConfig::defaults_for(dense.bounds, 0.6);
        const EnvMetrics a = compute_env_metrics(Scene(generate_map(dense)), tc, dense.r_poisson);
        const EnvMetrics b = compute_env_metrics(Scene(generate_map(sparse)), tc, sparse.r_poisson);
        EXPECT_LT(a.trav, b.trav);
        EXPECT_LT(a.rgs, b.rgs);
        EXPECT_GE(a.rgs, 1.0);
        EXPECT_GT(a.p_tau, 0.0);
        EXPECT_LE(b.p_tau, 1.0);
        EXPECT_EQ(a.p_tau, a.trav / a.trav_max);
        EXPECT_EQ(a.sample_points + a.skipped_points, 40 * 40);
    }
}
