#include "gapbench/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "gapbench/errors.hpp"
#include "gapbench/log.hpp"

namespace gapbench {

void ObstacleMap::validate() const {
    if (!bounds.valid()) throw DomainError("map bounds are empty");
    for (std::size_t i = 0; i < cylinders.size(); ++i) {
        const auto& c = cylinders[i];
        if (!(c.radius > 0.0) || !(c.height > 0.0))
            throw DomainError(fmt::format("cylinder {} has non-positive radius or height", i));
        if (!bounds.contains(c.center))
            throw DomainError(fmt::format("cylinder {} is centred outside the map bounds", i));
    }
}

std::optional<std::pair<int, int>> OccupancyGrid::cell_of(const Vec2& p) const {
    const double fx = (p.x() - origin.x()) / cell_size;
    const double fy = (p.y() - origin.y()) / cell_size;
    if (!(fx >= 0.0) || !(fy >= 0.0)) return std::nullopt;
    const int ix = static_cast<int>(std::floor(fx));
    const int iy = static_cast<int>(std::floor(fy));
    if (!in_range(ix, iy)) return std::nullopt;
    return std::pair{ix, iy};
}

OccupancyGrid OccupancyGrid::free_grid(Vec2 origin, double cell_size, int width, int height) {
    OccupancyGrid g;
    g.origin = origin;
    g.cell_size = cell_size;
    g.width = width;
    g.height = height;
    g.occupied.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    return g;
}

namespace detail {

double ray_cylinder(const Vec3& origin, const Vec3& dir, const Cylinder& cyl, double ground_z) {
    const double top = ground_z + cyl.height;
    const double rx = origin.x() - cyl.center.x();
    const double ry = origin.y() - cyl.center.y();
    const double c = rx * rx + ry * ry - cyl.radius * cyl.radius;
    const bool within_height = origin.z() >= ground_z && origin.z() <= top;
    if (c < 0.0 && within_height) return 0.0;

    double best = kNoHit;
    const double a = dir.x() * dir.x() + dir.y() * dir.y();
    if (a > 0.0 && c >= 0.0) {
        const double b = 2.0 * (rx * dir.x() + ry * dir.y());
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0 && b < 0.0) {
            // Numerically stable smaller root; both roots positive when b < 0 and c >= 0.
            const double q = -0.5 * (b - std::sqrt(disc));
            const double t = std::min(q / a, c / q);
            const double z = origin.z() + t * dir.z();
            if (t >= 0.0 && z >= ground_z && z <= top) best = t;
        }
    }
    // Top cap, reached from above.
    if (dir.z() < 0.0 && origin.z() > top) {
        const double t = (top - origin.z()) / dir.z();
        const double hx = rx + t * dir.x();
        const double hy = ry + t * dir.y();
        if (hx * hx + hy * hy <= cyl.radius * cyl.radius) best = std::min(best, t);
    }
    return best;
}

double ray_boundary(const Bounds& bounds, double ground_z, const Vec3& origin, const Vec3& dir) {
    double best = kNoHit;
    if (dir.x() > 0.0) best = std::min(best, (bounds.max_x - origin.x()) / dir.x());
    if (dir.x() < 0.0) best = std::min(best, (bounds.min_x - origin.x()) / dir.x());
    if (dir.y() > 0.0) best = std::min(best, (bounds.max_y - origin.y()) / dir.y());
    if (dir.y() < 0.0) best = std::min(best, (bounds.min_y - origin.y()) / dir.y());
    if (dir.z() < 0.0 && origin.z() >= ground_z)
        best = std::min(best, (ground_z - origin.z()) / dir.z());
    return std::max(best, 0.0);
}

namespace {

// Open interval of t where the horizontal distance to the cylinder axis is
// below radius; nullopt when empty. Infinite bounds for a stationary segment.
std::optional<std::pair<double, double>> horizontal_interval(const Vec3& p0, const Vec3& p1,
                                                             const Vec2& axis, double radius) {
    const double rx = p0.x() - axis.x();
    const double ry = p0.y() - axis.y();
    const double dx = p1.x() - p0.x();
    const double dy = p1.y() - p0.y();
    const double a = dx * dx + dy * dy;
    const double c = rx * rx + ry * ry - radius * radius;
    if (a == 0.0) {
        if (c < 0.0) return std::pair{-kNoHit, kNoHit};
        return std::nullopt;
    }
    const double b = 2.0 * (rx * dx + ry * dy);
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return std::nullopt;  // tangent contact is not a collision
    const double s = std::sqrt(disc);
    const double q = b >= 0.0 ? -0.5 * (b + s) : -0.5 * (b - s);
    double t1 = q / a;
    double t2 = q != 0.0 ? c / q : -t1;
    if (t1 > t2) std::swap(t1, t2);
    return std::pair{t1, t2};
}

// Closed interval of t where z lies in [lo, hi].
std::optional<std::pair<double, double>> vertical_interval(double z0, double z1, double lo,
                                                           double hi) {
    const double dz = z1 - z0;
    if (dz == 0.0) {
        if (z0 >= lo && z0 <= hi) return std::pair{-kNoHit, kNoHit};
        return std::nullopt;
    }
    double ta = (lo - z0) / dz;
    double tb = (hi - z0) / dz;
    if (ta > tb) std::swap(ta, tb);
    return std::pair{ta, tb};
}

// Open interval where coordinate x(t) = x0 + t*dx satisfies x < limit (below)
// or x > limit (!below).
std::optional<std::pair<double, double>> half_space(double x0, double x1, double limit,
                                                    bool below) {
    const double dx = x1 - x0;
    const bool start_in = below ? x0 < limit : x0 > limit;
    if (dx == 0.0) {
        if (start_in) return std::pair{-kNoHit, kNoHit};
        return std::nullopt;
    }
    const double t = (limit - x0) / dx;
    const bool entering_forward = below ? dx < 0.0 : dx > 0.0;
    if (entering_forward) return std::pair{t, kNoHit};
    return std::pair{-kNoHit, t};
}

// Earliest t in [0, 1] inside an open interval; nullopt if disjoint.
std::optional<double> first_in_unit(std::pair<double, double> open) {
    if (open.first < 1.0 && open.second > 0.0 && open.first < open.second)
        return std::max(open.first, 0.0);
    return std::nullopt;
}

}  // namespace

std::optional<double> segment_cylinder(const Vec3& p0, const Vec3& p1, const Cylinder& cyl,
                                       double ground_z, double inflation) {
    const auto h = horizontal_interval(p0, p1, cyl.center, cyl.radius + inflation);
    if (!h) return std::nullopt;
    const auto v = vertical_interval(p0.z(), p1.z(), ground_z, ground_z + cyl.height);
    if (!v) return std::nullopt;
    // Closed z-range and closed segment intersected with the open horizontal interval.
    const double lo = std::max(0.0, v->first);
    const double hi = std::min(1.0, v->second);
    if (lo > hi || !(lo < h->second) || !(hi > h->first)) return std::nullopt;
    return std::max(lo, h->first);
}

std::optional<std::pair<double, int>> segment_walls(const Bounds& bounds, const Vec3& p0,
                                                    const Vec3& p1, double inflation) {
    const std::optional<std::pair<double, double>> walls[4] = {
        half_space(p0.x(), p1.x(), bounds.min_x + inflation, true),
        half_space(p0.x(), p1.x(), bounds.max_x - inflation, false),
        half_space(p0.y(), p1.y(), bounds.min_y + inflation, true),
        half_space(p0.y(), p1.y(), bounds.max_y - inflation, false),
    };
    std::optional<std::pair<double, int>> best;
    for (int w = 0; w < 4; ++w) {
        if (!walls[w]) continue;
        const auto t = first_in_unit(*walls[w]);
        if (t && (!best || *t < best->first)) best = std::pair{*t, w};
    }
    return best;
}

bool point_in_cylinder(const Vec3& p, const Cylinder& cyl, double ground_z, double inflation) {
    const double dx = p.x() - cyl.center.x();
    const double dy = p.y() - cyl.center.y();
    const double r = cyl.radius + inflation;
    return dx * dx + dy * dy < r * r && p.z() >= ground_z && p.z() <= ground_z + cyl.height;
}

int point_near_wall(const Bounds& bounds, const Vec3& p, double inflation) {
    // Same limits as segment_walls so stationary sweeps agree with point checks.
    const bool inside[4] = {p.x() < bounds.min_x + inflation, p.x() > bounds.max_x - inflation,
                            p.y() < bounds.min_y + inflation, p.y() > bounds.max_y - inflation};
    for (int w = 0; w < 4; ++w) {
        if (inside[w]) return w;
    }
    return -1;
}

Contact cylinder_contact(const Cylinder& cyl, int index, double ground_z, const Vec3& drone,
                         double fraction) {
    Vec2 n = horizontal(drone) - cyl.center;
    const double len = n.norm();
    n = len > 0.0 ? Vec2(n / len) : Vec2(1.0, 0.0);
    const Vec2 surface = cyl.center + cyl.radius * n;
    const double z = std::clamp(drone.z(), ground_z, ground_z + cyl.height);
    return Contact{Vec3(surface.x(), surface.y(), z), index, drone, fraction};
}

Contact wall_contact(const Bounds& bounds, int wall, const Vec3& drone, double fraction) {
    Vec3 point = drone;
    switch (wall) {
        case 0: point.x() = bounds.min_x; break;
        case 1: point.x() = bounds.max_x; break;
        case 2: point.y() = bounds.min_y; break;
        default: point.y() = bounds.max_y; break;
    }
    return Contact{point, Contact::kBoundary, drone, fraction};
}

}  // namespace detail

double ray_cast(const ObstacleMap& map, const Vec3& origin, const Vec3& direction,
                double max_range) {
    if (!map.bounds.contains(horizontal(origin)))
        throw DomainError("ray origin outside map bounds");
    double best = std::min(max_range, detail::ray_boundary(map.bounds, map.ground_z, origin, direction));
    for (const auto& cyl : map.cylinders)
        best = std::min(best, detail::ray_cylinder(origin, direction, cyl, map.ground_z));
    return best;
}

std::optional<Contact> check_collision(const ObstacleMap& map, const Vec3& position,
                                       double d_drone) {
    const double inflation = 0.5 * d_drone;
    for (std::size_t i = 0; i < map.cylinders.size(); ++i) {
        if (detail::point_in_cylinder(position, map.cylinders[i], map.ground_z, inflation))
            return detail::cylinder_contact(map.cylinders[i], static_cast<int>(i), map.ground_z,
                                            position, 0.0);
    }
    if (const int wall = detail::point_near_wall(map.bounds, position, inflation); wall >= 0)
        return detail::wall_contact(map.bounds, wall, position, 0.0);
    return std::nullopt;
}

std::optional<Contact> swept_collision(const ObstacleMap& map, const Vec3& p0, const Vec3& p1,
                                       double d_drone) {
    const double inflation = 0.5 * d_drone;
    double best_t = detail::kNoHit;
    int best_index = Contact::kBoundary;
    for (std::size_t i = 0; i < map.cylinders.size(); ++i) {
        const auto t = detail::segment_cylinder(p0, p1, map.cylinders[i], map.ground_z, inflation);
        if (t && *t < best_t) {
            best_t = *t;
            best_index = static_cast<int>(i);
        }
    }
    const auto wall = detail::segment_walls(map.bounds, p0, p1, inflation);
    if (wall && wall->first < best_t) {
        const Vec3 at = p0 + wall->first * (p1 - p0);
        return detail::wall_contact(map.bounds, wall->second, at, wall->first);
    }
    if (best_index == Contact::kBoundary) return std::nullopt;
    const Vec3 at = p0 + best_t * (p1 - p0);
    return detail::cylinder_contact(map.cylinders[static_cast<std::size_t>(best_index)], best_index,
                                    map.ground_z, at, best_t);
}

OccupancyGrid rasterize_occupancy(const ObstacleMap& map, double cell_size, double d_drone,
                                  double altitude) {
    if (!(cell_size > 0.0)) throw DomainError("cell_size must be positive");
    double min_diameter = detail::kNoHit;
    for (const auto& c : map.cylinders) min_diameter = std::min(min_diameter, 2.0 * c.radius);
    if (cell_size > min_diameter)
        log::warn(fmt::format("cell size {} m exceeds the smallest obstacle diameter {} m; "
                              "thin obstacles may be missed",
                              cell_size, min_diameter));

    OccupancyGrid grid;
    grid.origin = Vec2(map.bounds.min_x, map.bounds.min_y);
    grid.cell_size = cell_size;
    grid.width = static_cast<int>(std::ceil(map.bounds.width() / cell_size));
    grid.height = static_cast<int>(std::ceil(map.bounds.height() / cell_size));
    grid.occupied.assign(static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height), 0);

    const double inflation = 0.5 * d_drone;
    for (int iy = 0; iy < grid.height; ++iy) {
        for (int ix = 0; ix < grid.width; ++ix) {
            const Vec2 c = grid.cell_center(ix, iy);
            const Vec3 p(c.x(), c.y(), altitude);
            if (!map.bounds.contains(c) || detail::point_near_wall(map.bounds, p, inflation) >= 0)
                grid.occupied[grid.index(ix, iy)] = 1;
        }
    }
    // Paint each inflated disc over the cells its bounding box touches.
    for (const auto& cyl : map.cylinders) {
        const double r = cyl.radius + inflation;
        const int x0 = std::max(0, static_cast<int>(std::floor((cyl.center.x() - r - grid.origin.x()) / cell_size)));
        const int x1 = std::min(grid.width - 1, static_cast<int>(std::floor((cyl.center.x() + r - grid.origin.x()) / cell_size)));
        const int y0 = std::max(0, static_cast<int>(std::floor((cyl.center.y() - r - grid.origin.y()) / cell_size)));
        const int y1 = std::min(grid.height - 1, static_cast<int>(std::floor((cyl.center.y() + r - grid.origin.y()) / cell_size)));
        for (int iy = y0; iy <= y1; ++iy) {
            for (int ix = x0; ix <= x1; ++ix) {
                const Vec2 c = grid.cell_center(ix, iy);
                if (detail::point_in_cylinder(Vec3(c.x(), c.y(), altitude), cyl, map.ground_z, inflation))
                    grid.occupied[grid.index(ix, iy)] = 1;
            }
        }
    }
    return grid;
}

}  // namespace gapbench
