#include <cmath>

#include <gtest/gtest.h>

#include "gapbench/errors.hpp"
#include "gapbench/path_oracle.hpp"
#include "gapbench/rng.hpp"
#include "test_support.hpp"

using namespace gapbench;

namespace {

OccupancyGrid random_grid(std::uint64_t seed, int n, double density) {
    OccupancyGrid g = OccupancyGrid::free_grid(Vec2(0, 0), 1.0, n, n);
    Rng rng(seed);
    for (auto& c : g.occupied) c = rng.bernoulli(density) ? 1 : 0;
    return g;
}

double polyline_length(const std::vector<Vec2>& pts) {
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
    return total;
}

}  // namespace

TEST(ShortestPath, StraightLine) {
    // Cell centres at (0,0) and (10,0) on a 0.5 m grid.
    const OccupancyGrid g = OccupancyGrid::free_grid(Vec2(-0.25, -0.25), 0.5, 22, 2);
    const PathResult p = shortest_free_path(g, Vec2(0, 0), Vec2(10, 0));
    EXPECT_NEAR(p.d_min, 10.0, 1e-12);
    EXPECT_EQ(p.straight_moves, 20);
    EXPECT_EQ(p.diagonal_moves, 0);
    EXPECT_EQ(dijkstra_reference(g, Vec2(0, 0), Vec2(10, 0)), p.d_min);
}

TEST(ShortestPath, DiagonalChain) {
    const OccupancyGrid g = OccupancyGrid::free_grid(Vec2(-0.25, -0.25), 0.5, 22, 22);
    const PathResult p = shortest_free_path(g, Vec2(0, 0), Vec2(10, 10));
    EXPECT_NEAR(p.d_min, 10.0 * std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(p.d_min, 14.142, 1e-3);
    EXPECT_EQ(p.diagonal_moves, 20);
}

TEST(ShortestPath, WaypointsAreNeighboursAndSumToCost) {
    const OccupancyGrid g = random_grid(4, 40, 0.2);
    Rng rng(9);
    int solved = 0;
    for (int k = 0; k < 50; ++k) {
        const Vec2 s(rng.uniform(0, 40), rng.uniform(0, 40));
        const Vec2 t(rng.uniform(0, 40), rng.uniform(0, 40));
        try {
            const PathResult p = shortest_free_path(g, s, t);
            for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
                const Vec2 d = (p.waypoints[i] - p.waypoints[i - 1]).cwiseAbs();
                EXPECT_LE(d.maxCoeff(), 1.0 + 1e-12);
                EXPECT_GT(d.maxCoeff(), 0.5);
            }
            EXPECT_NEAR(polyline_length(p.waypoints), p.d_min, 1e-9);
            ++solved;
        } catch (const DomainError&) {
        } catch (const UnreachableError&) {
        }
    }
    EXPECT_GT(solved, 10);
}

TEST(ShortestPath, DiscBlockingLineMatchesDijkstra) {
    ObstacleMap map = testkit::make_map(Bounds{0, 0, 20, 10}, {testkit::cyl(10, 5, 2.0)});
    const OccupancyGrid g = rasterize_occupancy(map, 0.2, 0.6, 1.5);
    const PathResult p = shortest_free_path(g, Vec2(2, 5), Vec2(18, 5));
    EXPECT_EQ(p.d_min, dijkstra_reference(g, Vec2(2, 5), Vec2(18, 5)));
    EXPECT_GT(p.d_min, 16.0);
}

TEST(ShortestPath, Unreachable) {
    OccupancyGrid g = OccupancyGrid::free_grid(Vec2(0, 0), 1.0, 10, 10);
    for (int y = 0; y < 10; ++y) g.occupied[g.index(5, y)] = 1;
    EXPECT_THROW((void)shortest_free_path(g, Vec2(1.5, 1.5), Vec2(8.5, 8.5)), UnreachableError);
    EXPECT_THROW((void)dijkstra_reference(g, Vec2(1.5, 1.5), Vec2(8.5, 8.5)), UnreachableError);
}

TEST(ShortestPath, NoCornerCutting) {
    OccupancyGrid g = OccupancyGrid::free_grid(Vec2(0, 0), 1.0, 3, 3);
    g.occupied[g.index(1, 0)] = 1;
    g.occupied[g.index(0, 1)] = 1;
    EXPECT_THROW((void)shortest_free_path(g, Vec2(0.5, 0.5), Vec2(1.5, 1.5)), UnreachableError);
}

TEST(ShortestPath, OccupiedEndpointIsDomainError) {
    OccupancyGrid g = OccupancyGrid::free_grid(Vec2(0, 0), 1.0, 5, 5);
    g.occupied[g.index(0, 0)] = 1;
    EXPECT_THROW((void)shortest_free_path(g, Vec2(0.5, 0.5), Vec2(4.5, 4.5)), DomainError);
    EXPECT_THROW((void)shortest_free_path(g, Vec2(1.5, 1.5), Vec2(40, 4.5)), DomainError);
}

TEST(ShortestPath, RandomGridsMatchDijkstra) {
    int solvable = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        OccupancyGrid g = random_grid(seed, 64, 0.2);
        g.occupied[g.index(0, 0)] = 0;
        g.occupied[g.index(63, 63)] = 0;
        const Vec2 s = g.cell_center(0, 0), t = g.cell_center(63, 63);
        double a = -1.0, d = -1.0;
        try {
            a = shortest_free_path(g, s, t).d_min;
        } catch (const UnreachableError&) {
        }
        try {
            d = dijkstra_reference(g, s, t);
        } catch (const UnreachableError&) {
        }
        ASSERT_EQ(a, d) << "seed " << seed;
        solvable += a >= 0.0 ? 1 : 0;
    }
    EXPECT_GT(solvable, 50);
}

TEST(ShortestPath, EuclideanLowerBound) {
    const ObstacleMap map = testkit::random_map(3, 40, Bounds{0, 0, 40, 40}, 0.2, 1.0, 5, 5);
    const OccupancyGrid g = rasterize_occupancy(map, 0.2, 0.6, 1.5);
    Rng rng(2);
    for (int k = 0; k < 30; ++k) {
        const Vec2 s(rng.uniform(1, 39), rng.uniform(1, 39));
        const Vec2 t(rng.uniform(1, 39), rng.uniform(1, 39));
        try {
            const double d = shortest_free_path(g, s, t).d_min;
            EXPECT_GE(d, (t - s).norm() - 2.0 * 0.2 * std::sqrt(2.0));
        } catch (const std::exception&) {
        }
    }
}

TEST(ShortestPath, RemovingObstacleNeverLengthens) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        OccupancyGrid g = random_grid(seed + 500, 32, 0.25);
        g.occupied[g.index(0, 0)] = 0;
        g.occupied[g.index(31, 31)] = 0;
        const Vec2 s = g.cell_center(0, 0), t = g.cell_center(31, 31);
        double before = std::numeric_limits<double>::infinity();
        try {
            before = shortest_free_path(g, s, t).d_min;
        } catch (const UnreachableError&) {
        }
        Rng rng(seed);
        for (int k = 0; k < 10; ++k) {
            const auto i = static_cast<std::size_t>(rng.below(g.occupied.size()));
            g.occupied[i] = 0;
        }
        double after = std::numeric_limits<double>::infinity();
        try {
            after = shortest_free_path(g, s, t).d_min;
        } catch (const UnreachableError&) {
        }
        EXPECT_LE(after, before);
    }
}

TEST(OctileLength, CountsToMetres) {
    EXPECT_DOUBLE_EQ(octile_length(0.5, 4, 0), 2.0);
    EXPECT_DOUBLE_EQ(octile_length(1.0, 0, 2), 2.0 * std::sqrt(2.0));
}
