#pragma once

#include <Eigen/Core>

namespace gapbench {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Axis-aligned rectangle in the horizontal plane (metres).
struct Bounds {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    [[nodiscard]] double width() const { return max_x - min_x; }
    [[nodiscard]] double height() const { return max_y - min_y; }
    [[nodiscard]] Vec2 center() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }
    [[nodiscard]] bool valid() const { return max_x > min_x && max_y > min_y; }

    // Closed: points on the boundary count as inside.
    [[nodiscard]] bool contains(const Vec2& p) const {
        return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
    }

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

inline Vec2 horizontal(const Vec3& p) { return {p.x(), p.y()}; }

}  // namespace gapbench
