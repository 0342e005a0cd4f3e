#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "gapbench/errors.hpp"
#include "gapbench/map_gen.hpp"
#include "gapbench/rng.hpp"
#include "gapbench/scene.hpp"

using namespace gapbench;

namespace {

double min_pairwise(const std::vector<Vec2>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, (pts[i] - pts[j]).norm());
    return best;
}

}  // namespace

TEST(PoissonDisc, MinimumDistanceAndPackingBound) {
    const Bounds b{0, 0, 160, 160};
    const auto pts = poisson_disc_sample(b, 5.0, 42);
    ASSERT_GT(pts.size(), 100u);
    EXPECT_GE(min_pairwise(pts), 5.0);
    EXPECT_LE(static_cast<double>(pts.size()), b.width() * b.height() / (kPi * 2.5 * 2.5));
    for (const auto& p : pts) EXPECT_TRUE(b.contains(p));
}

TEST(PoissonDisc, TinyBoundsGiveOnePoint) {
    // Cells of side r/sqrt(2) can hold one point; bounds below that hold exactly one.
    EXPECT_EQ(poisson_disc_sample(Bounds{0, 0, 3, 3}, 5.0, 1).size(), 1u);
    EXPECT_EQ(poisson_disc_sample(Bounds{10, 10, 10.5, 12}, 2.0, 9).size(), 1u);
}

TEST(PoissonDisc, Deterministic) {
    const Bounds b{0, 0, 60, 40};
    const auto a = poisson_disc_sample(b, 3.0, 77);
    const auto c = poisson_disc_sample(b, 3.0, 77);
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], c[i]);
    EXPECT_NE(poisson_disc_sample(b, 3.0, 78).front(), a.front());
}

TEST(PoissonDisc, RejectsNonPositiveRadius) {
    EXPECT_THROW((void)poisson_disc_sample(Bounds{0, 0, 1, 1}, 0.0, 1), GenerationError);
}

TEST(PoissonDisc, MaximalOnRandomProbes) {
    const Bounds b{0, 0, 50, 50};
    const auto pts = poisson_disc_sample(b, 2.5, 5);
    Rng rng(1);
    int covered = 0;
    constexpr int kProbes = 5000;
    for (int i = 0; i < kProbes; ++i) {
        const Vec2 p(rng.uniform(0, 50), rng.uniform(0, 50));
        for (const auto& q : pts) {
            if ((p - q).norm() < 2.5) {
                ++covered;
                break;
            }
        }
    }
    EXPECT_GE(covered, kProbes * 99 / 100);
}

TEST(GenerateMap, IndoorHasOneCylinderPerSite) {
    MapSpec spec;
    spec.bounds = {0, 0, 60, 60};
    spec.r_poisson = 4.0;
    spec.map_seed = 12;
    const ObstacleMap map = generate_map(spec);
    const auto sites = poisson_disc_sample(spec.bounds, spec.r_poisson, derive_seed(12, Stream::PoissonSites));
    ASSERT_EQ(map.cylinders.size(), sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        EXPECT_EQ(map.cylinders[i].center, sites[i]);
        EXPECT_EQ(map.cylinders[i].site, static_cast<int>(i));
        EXPECT_GE(map.cylinders[i].radius, spec.obstacle_radius_range.first);
        EXPECT_LE(map.cylinders[i].radius, spec.obstacle_radius_range.second);
    }
    EXPECT_NO_THROW(map.validate());
    EXPECT_EQ(generate_map(spec), map);
}

TEST(GenerateMap, OutdoorClusterRatio) {
    MapSpec spec;
    spec.style = MapStyle::OutdoorClusters;
    spec.cluster_ratio = 0.4;
    spec.r_poisson = 4.0;
    spec.map_seed = 99;
    const ObstacleMap map = generate_map(spec);
    std::map<int, int> members;
    for (const auto& c : map.cylinders) ++members[c.site];
    int clusters = 0;
    for (const auto& [site, count] : members) clusters += count > 1 ? 1 : 0;
    const double n = static_cast<double>(members.size());
    const double frac = clusters / n;
    // 4 binomial standard deviations
    EXPECT_NEAR(frac, 0.4, 4.0 * std::sqrt(0.4 * 0.6 / n));
    for (const auto& c : map.cylinders) EXPECT_TRUE(spec.bounds.contains(c.center));
}

TEST(GenerateMap, RejectsGapBelowOneDroneDiameter) {
    MapSpec spec;
    spec.d_drone = 0.6;
    spec.r_poisson = spec.implied_mean_width() + 0.5 * spec.d_drone;
    EXPECT_THROW((void)generate_map(spec), GenerationError);
    spec.r_poisson = spec.implied_mean_width() + 1.0 * spec.d_drone + 1e-9;
    EXPECT_NO_THROW((void)generate_map(spec));
}

TEST(MapStyleNames, RoundTrip) {
    for (auto s : {MapStyle::IndoorCylinders, MapStyle::OutdoorClusters})
        EXPECT_EQ(map_style_from_string(to_string(s)), s);
    EXPECT_EQ(map_style_from_string("outdoor"), MapStyle::OutdoorClusters);
    EXPECT_THROW((void)map_style_from_string("forest"), std::invalid_argument);
}

TEST(GenerateTrial, ExactDistanceOnEmptyMap) {
    ObstacleMap map;
    map.bounds = {0, 0, 160, 160};
    TrialConstraints tc;
    tc.d_lo = tc.d_hi = 50.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const TrialSpec t = generate_trial(map, seed, tc);
        EXPECT_NEAR((t.goal - t.start).norm(), 50.0, 1e-9);
        EXPECT_EQ(t.start.z(), tc.altitude);
        EXPECT_EQ(t.goal.z(), tc.altitude);
        EXPECT_EQ(t.max_time, tc.max_time);
    }
}

TEST(GenerateTrial, Deterministic) {
    MapSpec spec;
    spec.map_seed = 3;
    const ObstacleMap map = generate_map(spec);
    EXPECT_EQ(generate_trial(map, 123, {}), generate_trial(map, 123, {}));
    EXPECT_NE(generate_trial(map, 123, {}), generate_trial(map, 124, {}));
}

TEST(GenerateTrial, EndpointsClearOfObstacles) {
    MapSpec spec;
    spec.r_poisson = 2.3;
    spec.map_seed = 8;
    const ObstacleMap map = generate_map(spec);
    const Scene scene(map);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const TrialSpec t = generate_trial(map, seed, {});
        EXPECT_FALSE(scene.check_collision(t.start, 0.6));
        EXPECT_FALSE(scene.check_collision(t.goal, 0.6));
        const double d = (t.goal - t.start).norm();
        EXPECT_GE(d, 30.0);
        EXPECT_LE(d, 60.0);
    }
}

TEST(GenerateTrial, FullyBlockedMapIsInfeasible) {
    ObstacleMap map;
    map.bounds = {0, 0, 20, 20};
    map.cylinders.push_back({Vec2(10, 10), 20.0, 10.0, 0});
    TrialConstraints tc;
    tc.d_lo = 5;
    tc.d_hi = 10;
    EXPECT_THROW((void)generate_trial(map, 1, tc), InfeasibleError);
}

TEST(GenerateTrial, DistanceLargerThanMapIsInfeasible) {
    ObstacleMap map;
    map.bounds = {0, 0, 20, 20};
    TrialConstraints tc;
    tc.d_lo = 40;
    tc.d_hi = 50;
    EXPECT_THROW((void)generate_trial(map, 1, tc), InfeasibleError);
}
