#pragma once

#include <optional>
#include <vector>

#include "gapbench/geometry.hpp"

namespace gapbench {

/// Immutable obstacle map plus a uniform bucket index over the cylinders.
///
/// Queries return bit-identical results to the reference free functions in
/// geometry.hpp; only the candidate set differs. Safe for concurrent reads.
class Scene {
public:
    explicit Scene(ObstacleMap map, double bucket_size = 2.0);

    [[nodiscard]] const ObstacleMap& map() const { return map_; }
    [[nodiscard]] const Bounds& bounds() const { return map_.bounds; }

    [[nodiscard]] double ray_cast(const Vec3& origin, const Vec3& direction, double max_range) const;
    [[nodiscard]] std::optional<Contact> check_collision(const Vec3& position, double d_drone) const;
    [[nodiscard]] std::optional<Contact> swept_collision(const Vec3& p0, const Vec3& p1,
                                                         double d_drone) const;

private:
    [[nodiscard]] int bucket_x(double x) const;
    [[nodiscard]] int bucket_y(double y) const;
    template <typename Fn>
    void for_each_in_box(double x0, double y0, double x1, double y1, Fn&& fn) const;

    ObstacleMap map_;
    double bucket_size_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<std::size_t> offsets_;  // CSR over buckets
    std::vector<int> entries_;
};

}  // namespace gapbench
