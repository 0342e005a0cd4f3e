#pragma once

#include <vector>

#include "gapbench/geometry.hpp"

namespace gapbench {

/// Shortest 8-connected grid path. Diagonal moves must not cut the corner of
/// an occupied orthogonal neighbour.
struct PathResult {
    double d_min = 0.0;
    std::vector<Vec2> waypoints;  // cell centres, start cell first
    int straight_moves = 0;
    int diagonal_moves = 0;
};

/// A* with the octile heuristic. Throws DomainError when start or goal falls
/// on an occupied or out-of-range cell and UnreachableError when no path exists.
[[nodiscard]] PathResult shortest_free_path(const OccupancyGrid& grid, const Vec2& start,
                                            const Vec2& goal);

/// Uniform-cost search with the same connectivity and costs; an independent
/// reference for shortest_free_path.
[[nodiscard]] double dijkstra_reference(const OccupancyGrid& grid, const Vec2& start,
                                        const Vec2& goal);

/// Path cost of the given move counts. Both searches accumulate costs as
/// integer move counts and convert through this function, so equal paths give
/// bit-equal lengths.
[[nodiscard]] double octile_length(double cell_size, int straight_moves, int diagonal_moves);

}  // namespace gapbench
