#include <cmath>

#include <gtest/gtest.h>

#include "gapbench/errors.hpp"
#include "gapbench/geometry.hpp"
#include "gapbench/scene.hpp"
#include "test_support.hpp"

using namespace gapbench;
using gapbench::testkit::cyl;
using gapbench::testkit::make_map;

namespace {

const Bounds kCentered{-80.0, -80.0, 80.0, 80.0};

}  // namespace

TEST(RayCast, CylinderDeadAhead) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    EXPECT_NEAR(ray_cast(map, Vec3(0, 0, 1.5), Vec3::UnitX(), 100.0), 4.5, 1e-12);
}

TEST(RayCast, EmptyMapHitsBoundaryFromCentre) {
    const ObstacleMap map = make_map(kCentered);
    for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * kPi * k / 16.0;
        const Vec3 d = testkit::heading(a);
        const double expected = 80.0 / std::max(std::abs(d.x()), std::abs(d.y()));
        EXPECT_NEAR(ray_cast(map, Vec3(0, 0, 1.5), d, 1000.0), expected, 1e-9) << "k=" << k;
    }
    EXPECT_NEAR(ray_cast(map, Vec3(0, 0, 1.5), Vec3::UnitY(), 1000.0), 80.0, 1e-9);
}

TEST(RayCast, OffAxisCylinderMatchesMarch) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0.4, 0.5)});
    const double t = ray_cast(map, Vec3(0, 0, 1.5), Vec3::UnitX(), 100.0);
    EXPECT_NEAR(t, 5.0 - std::sqrt(0.25 - 0.16), 1e-12);
    EXPECT_NEAR(t, 4.7, 1e-12);
    EXPECT_NEAR(t, testkit::march_cylinders(map, Vec3(0, 0, 1.5), Vec3::UnitX(), 10.0), 2e-4);
}

TEST(RayCast, CappedAtMaxRange) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    EXPECT_DOUBLE_EQ(ray_cast(map, Vec3(0, 0, 1.5), Vec3::UnitX(), 2.0), 2.0);
}

TEST(RayCast, PassesOverShortCylinder) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5, 1.0)});
    EXPECT_NEAR(ray_cast(map, Vec3(0, 0, 1.5), Vec3::UnitX(), 200.0), 80.0, 1e-9);
}

TEST(RayCast, DescendingRayHitsTopCapOrGround) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 1.0, 1.0)});
    // Drops 0.5 m per 5 m: reaches z = 1.0 at x = 5, inside the cap disc.
    const Vec3 d = testkit::unit(10.0, 0.0, -1.0);
    const double t = ray_cast(map, Vec3(0, 0, 1.5), d, 200.0);
    EXPECT_NEAR(t, std::hypot(5.0, 0.5), 1e-9);
    // Without the cylinder it reaches the ground at x = 15.
    EXPECT_NEAR(ray_cast(make_map(kCentered), Vec3(0, 0, 1.5), d, 200.0), std::hypot(15.0, 1.5), 1e-9);
}

TEST(RayCast, RandomRaysMatchMarchOracle) {
    const ObstacleMap map = testkit::random_map(11, 25, Bounds{0, 0, 20, 20}, 0.2, 1.0, 10.0, 10.0);
    Rng rng(5);
    int checked = 0;
    while (checked < 40) {
        const Vec3 o(rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5), 1.5);
        if (check_collision(map, o, 0.0)) continue;
        const Vec3 d = testkit::heading(rng.uniform(0.0, 2.0 * kPi));
        const double range = 6.0;
        const double t = ray_cast(map, o, d, range);
        const double bound = detail::ray_boundary(map.bounds, map.ground_z, o, d);
        const double marched = std::min(testkit::march_cylinders(map, o, d, range), bound);
        EXPECT_NEAR(t, std::min(marched, range), 2e-4);
        ++checked;
    }
}

TEST(RayCast, OriginOutsideBoundsThrows) {
    EXPECT_THROW((void)ray_cast(make_map(kCentered), Vec3(100, 0, 1), Vec3::UnitX(), 10.0), DomainError);
}

TEST(CheckCollision, InsideInflatedRadius) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    const auto c = check_collision(map, Vec3(4.4, 0, 1.5), 0.6);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->obstacle_index, 0);
    EXPECT_NEAR(c->point.x(), 4.5, 1e-12);
}

TEST(CheckCollision, FarAway) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    EXPECT_FALSE(check_collision(map, Vec3(3, 0, 1.5), 0.6));
}

TEST(CheckCollision, ExactlyTouchingIsFree) {
    // radius 0.5 + d/2 0.25 = 0.75, all exactly representable
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    EXPECT_FALSE(check_collision(map, Vec3(4.25, 0, 1.5), 0.5));
    EXPECT_TRUE(check_collision(map, Vec3(std::nextafter(4.25, 5.0), 0, 1.5), 0.5));
}

TEST(CheckCollision, BoundaryWall) {
    const ObstacleMap map = make_map(Bounds{0, 0, 10, 10});
    EXPECT_FALSE(check_collision(map, Vec3(0.5, 5, 1.5), 1.0));
    const auto c = check_collision(map, Vec3(0.4, 5, 1.5), 1.0);
    ASSERT_TRUE(c);
    EXPECT_TRUE(c->is_boundary());
    EXPECT_NEAR(c->point.x(), 0.0, 1e-12);
}

TEST(CheckCollision, AboveCylinderTop) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5, 1.0)});
    EXPECT_FALSE(check_collision(map, Vec3(5, 0, 1.5), 0.6));
    EXPECT_TRUE(check_collision(map, Vec3(5, 0, 1.0), 0.6));
}

TEST(SweptCollision, ThroughCylinder) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    const auto c = swept_collision(map, Vec3(0, 0, 1.5), Vec3(10, 0, 1.5), 0.6);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->obstacle_index, 0);
    EXPECT_NEAR(c->drone_position.x(), 4.2, 1e-12);
    EXPECT_NEAR(c->fraction, 0.42, 1e-12);
    EXPECT_NEAR(c->point.x(), 4.5, 1e-12);

    // 1e-4 m march of the drone centre against the inflated disc
    double marched = 10.0;
    for (double x = 0.0; x <= 10.0; x += 1e-4) {
        if (std::abs(x - 5.0) < 0.8) {
            marched = x;
            break;
        }
    }
    EXPECT_NEAR(c->drone_position.x(), marched, 2e-4);
}

TEST(SweptCollision, FreeSegment) {
    const ObstacleMap map = make_map(kCentered, {cyl(5, 0, 0.5)});
    EXPECT_FALSE(swept_collision(map, Vec3(0, 2, 1.5), Vec3(10, 2, 1.5), 0.6));
}

TEST(SweptCollision, DegenerateSegmentEqualsPointCheck) {
    const ObstacleMap map = make_map(Bounds{0, 0, 10, 10}, {cyl(5, 5, 0.5)});
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const Vec3 p(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 12));
        const auto a = check_collision(map, p, 0.6);
        const auto b = swept_collision(map, p, p, 0.6);
        ASSERT_EQ(a.has_value(), b.has_value()) << p.transpose();
        if (a) EXPECT_EQ(a->obstacle_index, b->obstacle_index);
    }
}

TEST(SweptCollision, NoTunnellingThroughThinCylinder) {
    const ObstacleMap map = make_map(kCentered, {cyl(0, 0, 0.1)});
    // A 20 m step passes straight over the cylinder; the sweep still sees it.
    EXPECT_TRUE(swept_collision(map, Vec3(-10, 0.05, 1.5), Vec3(10, 0.05, 1.5), 0.6));
}

TEST(SweptCollision, ReportsEarliestOfSeveral) {
    const ObstacleMap map = make_map(kCentered, {cyl(8, 0, 0.5), cyl(4, 0, 0.5)});
    const auto c = swept_collision(map, Vec3(0, 0, 1.5), Vec3(10, 0, 1.5), 0.6);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->obstacle_index, 1);
}

TEST(Rasterize, EmptyMapBorderRing) {
    const ObstacleMap map = make_map(Bounds{0, 0, 10, 10});
    const OccupancyGrid g = rasterize_occupancy(map, 0.5, 0.6, 1.5);
    ASSERT_EQ(g.width, 20);
    ASSERT_EQ(g.height, 20);
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            const bool border = ix == 0 || iy == 0 || ix == g.width - 1 || iy == g.height - 1;
            EXPECT_EQ(g.is_occupied(ix, iy), border) << ix << "," << iy;
        }
    }
}

TEST(Rasterize, InflatedDiscRadius) {
    const ObstacleMap map = make_map(Bounds{0, 0, 10, 10}, {cyl(5, 5, 0.5)});
    const OccupancyGrid g = rasterize_occupancy(map, 0.2, 0.6, 1.5);
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            const double r = (g.cell_center(ix, iy) - Vec2(5, 5)).norm();
            if (r < 0.8 - 0.2) EXPECT_TRUE(g.is_occupied(ix, iy));
            if (r > 0.8 + 0.2 && r < 3.0) EXPECT_FALSE(g.is_occupied(ix, iy));
        }
    }
}

TEST(Rasterize, AgreesWithPointCheckAtCellCentres) {
    const ObstacleMap map = testkit::random_map(21, 30, Bounds{0, 0, 20, 20}, 0.2, 1.0, 3.0, 3.0);
    const OccupancyGrid g = rasterize_occupancy(map, 0.25, 0.6, 1.5);
    for (int iy = 0; iy < g.height; ++iy) {
        for (int ix = 0; ix < g.width; ++ix) {
            const Vec2 c = g.cell_center(ix, iy);
            const bool hit = check_collision(map, Vec3(c.x(), c.y(), 1.5), 0.6).has_value();
            EXPECT_EQ(g.is_occupied(ix, iy), hit) << ix << "," << iy;
        }
    }
}

TEST(Rasterize, GapOfDroneDiameterHasNoCorridor) {
    // A fence of cylinders r = 0.3 along x = 5 with surface gaps of exactly
    // d_drone = 0.6: inflated discs (r 0.6) touch at y = 1.2 k, which lie on
    // cell boundaries at cell 0.1, so no cell centre is free inside the fence.
    std::vector<Cylinder> fence;
    for (int k = 0; k <= 8; ++k) fence.push_back(cyl(5.0, 1.2 * k, 0.3));
    const ObstacleMap map = make_map(Bounds{0, 0, 10, 10}, fence);
    const OccupancyGrid g = rasterize_occupancy(map, 0.1, 0.6, 1.5);

    // Exhaustive flood fill from the left half.
    std::vector<std::uint8_t> seen(g.occupied.size(), 0);
    std::vector<std::pair<int, int>> stack{{10, 50}};
    ASSERT_FALSE(g.is_occupied(10, 50));
    seen[g.index(10, 50)] = 1;
    bool crossed = false;
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        if (g.cell_center(x, y).x() > 5.0) crossed = true;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (g.is_occupied(nx, ny) || seen[g.index(nx, ny)]) continue;
                seen[g.index(nx, ny)] = 1;
                stack.emplace_back(nx, ny);
            }
        }
    }
    EXPECT_FALSE(crossed);
}

TEST(SceneIndex, MatchesReferenceQueries) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const ObstacleMap map = testkit::random_map(seed, 120, Bounds{-10, 0, 30, 25});
        const Scene scene(map, 1.7);
        Rng rng(seed * 101);
        for (int i = 0; i < 3000; ++i) {
            const Vec3 o(rng.uniform(-10, 30), rng.uniform(0, 25), rng.uniform(0.0, 7.0));
            const Vec3 d = testkit::heading(rng.uniform(0, 2 * kPi), rng.uniform(-0.3, 0.3));
            const double range = rng.uniform(0.1, 60.0);
            ASSERT_EQ(scene.ray_cast(o, d, range), ray_cast(map, o, d, range));

            const double dd = rng.uniform(0.0, 1.2);
            const auto a = scene.check_collision(o, dd);
            const auto b = check_collision(map, o, dd);
            ASSERT_EQ(a.has_value(), b.has_value());
            if (a) {
                EXPECT_EQ(a->obstacle_index, b->obstacle_index);
                EXPECT_EQ(a->point, b->point);
            }

            const Vec3 p1 = o + Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-0.5, 0.5));
            const auto s = scene.swept_collision(o, p1, dd);
            const auto r = swept_collision(map, o, p1, dd);
            ASSERT_EQ(s.has_value(), r.has_value());
            if (s) {
                EXPECT_EQ(s->obstacle_index, r->obstacle_index);
                EXPECT_EQ(s->fraction, r->fraction);
                EXPECT_EQ(s->drone_position, r->drone_position);
            }
        }
    }
}

TEST(ObstacleMapValidate, RejectsDegenerate) {
    EXPECT_THROW(make_map(kCentered, {cyl(0, 0, 0.0)}).validate(), DomainError);
    EXPECT_THROW(make_map(kCentered, {cyl(200, 0, 1.0)}).validate(), DomainError);
    EXPECT_NO_THROW(make_map(kCentered, {cyl(0, 0, 1.0)}).validate());
}

TEST(RayCastProperty, NeverExceedsRange) {
    const ObstacleMap map = testkit::random_map(8, 60);
    Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 o(rng.uniform(0, 40), rng.uniform(0, 40), rng.uniform(0, 5));
        const double range = rng.uniform(0.0, 50.0);
        const double t = ray_cast(map, o, testkit::heading(rng.uniform(0, 2 * kPi), rng.uniform(-1, 1)), range);
        EXPECT_LE(t, range);
        EXPECT_GE(t, 0.0);
    }
}
