#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gapbench/types.hpp"

namespace gapbench {

/// Vertical cylinder standing on the ground plane.
struct Cylinder {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
    double height = 0.0;
    // Index of the Poisson site this cylinder belongs to; cylinders of one
    // outdoor cluster share a site. -1 when unknown.
    int site = -1;

    friend bool operator==(const Cylinder&, const Cylinder&) = default;
};

/// Analytic scene: bounds, flat ground and a set of cylinders.
struct ObstacleMap {
    Bounds bounds;
    std::vector<Cylinder> cylinders;
    double ground_z = 0.0;
    std::uint64_t map_seed = 0;

    /// Throws DomainError if a cylinder is degenerate or centred outside the bounds.
    void validate() const;

    friend bool operator==(const ObstacleMap&, const ObstacleMap&) = default;
};

struct Contact {
    static constexpr int kBoundary = -1;

    Vec3 point = Vec3::Zero();            // on the contacted surface
    int obstacle_index = kBoundary;       // cylinder index, or kBoundary
    Vec3 drone_position = Vec3::Zero();   // drone centre at first contact
    double fraction = 0.0;                // position along the swept segment, [0, 1]

    [[nodiscard]] bool is_boundary() const { return obstacle_index == kBoundary; }
};

/// Boolean raster of the inflated free space at one altitude.
struct OccupancyGrid {
    Vec2 origin = Vec2::Zero();  // lower-left corner of cell (0, 0)
    double cell_size = 1.0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> occupied;  // row-major, y-major rows

    [[nodiscard]] std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(ix);
    }
    [[nodiscard]] bool in_range(int ix, int iy) const {
        return ix >= 0 && iy >= 0 && ix < width && iy < height;
    }
    [[nodiscard]] bool is_occupied(int ix, int iy) const {
        return !in_range(ix, iy) || occupied[index(ix, iy)] != 0;
    }
    [[nodiscard]] Vec2 cell_center(int ix, int iy) const {
        return origin + cell_size * Vec2(ix + 0.5, iy + 0.5);
    }
    /// Cell containing p, or nullopt outside the raster.
    [[nodiscard]] std::optional<std::pair<int, int>> cell_of(const Vec2& p) const;

    /// Empty (all free) grid, mostly useful for tests.
    static OccupancyGrid free_grid(Vec2 origin, double cell_size, int width, int height);
};

// ---------------------------------------------------------------------------
// Reference queries. These scan every cylinder; Scene (scene.hpp) provides
// the same queries over a bucket index and returns identical values.
// ---------------------------------------------------------------------------

/// Distance along a unit direction to the first cylinder, boundary wall, or
/// ground hit, capped at max_range. Throws DomainError if the origin is
/// horizontally outside the bounds.
[[nodiscard]] double ray_cast(const ObstacleMap& map, const Vec3& origin, const Vec3& direction,
                              double max_range);

/// Contact if a sphere of diameter d_drone at position overlaps a cylinder
/// (strictly) or comes strictly closer than d_drone/2 to a boundary wall.
[[nodiscard]] std::optional<Contact> check_collision(const ObstacleMap& map, const Vec3& position,
                                                     double d_drone);

/// First contact of a sphere swept along p0 -> p1.
[[nodiscard]] std::optional<Contact> swept_collision(const ObstacleMap& map, const Vec3& p0,
                                                     const Vec3& p1, double d_drone);

/// Inflated occupancy raster at the given altitude. Warns (log::warn) when
/// cell_size exceeds the smallest obstacle diameter.
[[nodiscard]] OccupancyGrid rasterize_occupancy(const ObstacleMap& map, double cell_size,
                                                double d_drone, double altitude);

namespace detail {

// Per-primitive kernels shared by the reference and indexed queries.

inline constexpr double kNoHit = std::numeric_limits<double>::infinity();

/// Ray parameter of the first hit with one cylinder, or kNoHit. 0 if the origin is inside.
double ray_cylinder(const Vec3& origin, const Vec3& dir, const Cylinder& cyl, double ground_z);

/// Ray parameter to the boundary walls and the ground plane.
double ray_boundary(const Bounds& bounds, double ground_z, const Vec3& origin, const Vec3& dir);

/// Earliest fraction in [0, 1] at which the inflated cylinder is touched by the
/// segment, or nullopt when the segment never enters its (open) interior.
std::optional<double> segment_cylinder(const Vec3& p0, const Vec3& p1, const Cylinder& cyl,
                                       double ground_z, double inflation);

/// Earliest fraction and wall id (0..3: -x, +x, -y, +y) for the inflated walls.
std::optional<std::pair<double, int>> segment_walls(const Bounds& bounds, const Vec3& p0,
                                                    const Vec3& p1, double inflation);

bool point_in_cylinder(const Vec3& p, const Cylinder& cyl, double ground_z, double inflation);

Contact cylinder_contact(const Cylinder& cyl, int index, double ground_z, const Vec3& drone,
                         double fraction);
Contact wall_contact(const Bounds& bounds, int wall, const Vec3& drone, double fraction);

/// Wall id the point is strictly closer than inflation to, or -1.
int point_near_wall(const Bounds& bounds, const Vec3& p, double inflation);

}  // namespace detail

}  // namespace gapbench
