#include "gapbench/scene.hpp"

#include <algorithm>
#include <cmath>

#include "gapbench/errors.hpp"

namespace gapbench {

Scene::Scene(ObstacleMap map, double bucket_size) : map_(std::move(map)), bucket_size_(bucket_size) {
    map_.validate();
    if (!(bucket_size_ > 0.0)) throw DomainError("bucket size must be positive");
    nx_ = std::max(1, static_cast<int>(std::ceil(map_.bounds.width() / bucket_size_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(map_.bounds.height() / bucket_size_)));

    const auto buckets = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    std::vector<std::size_t> counts(buckets + 1, 0);
    auto visit = [&](auto&& emit) {
        for (std::size_t i = 0; i < map_.cylinders.size(); ++i) {
            const auto& c = map_.cylinders[i];
            const int x0 = bucket_x(c.center.x() - c.radius), x1 = bucket_x(c.center.x() + c.radius);
            const int y0 = bucket_y(c.center.y() - c.radius), y1 = bucket_y(c.center.y() + c.radius);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    emit(static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(x), static_cast<int>(i));
        }
    };
    visit([&](std::size_t b, int) { ++counts[b + 1]; });
    for (std::size_t b = 0; b < buckets; ++b) counts[b + 1] += counts[b];
    offsets_ = counts;
    entries_.resize(offsets_.back());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    visit([&](std::size_t b, int i) { entries_[cursor[b]++] = i; });
}

int Scene::bucket_x(double x) const {
    const int b = static_cast<int>(std::floor((x - map_.bounds.min_x) / bucket_size_));
    return std::clamp(b, 0, nx_ - 1);
}

int Scene::bucket_y(double y) const {
    const int b = static_cast<int>(std::floor((y - map_.bounds.min_y) / bucket_size_));
    return std::clamp(b, 0, ny_ - 1);
}

template <typename Fn>
void Scene::for_each_in_box(double x0, double y0, double x1, double y1, Fn&& fn) const {
    const int bx0 = bucket_x(x0), bx1 = bucket_x(x1);
    const int by0 = bucket_y(y0), by1 = bucket_y(y1);
    for (int y = by0; y <= by1; ++y) {
        for (int x = bx0; x <= bx1; ++x) {
            const auto b = static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(x);
            for (std::size_t k = offsets_[b]; k < offsets_[b + 1]; ++k) fn(entries_[k]);
        }
    }
}

double Scene::ray_cast(const Vec3& origin, const Vec3& dir, double max_range) const {
    if (!map_.bounds.contains(horizontal(origin)))
        throw DomainError("ray origin outside map bounds");
    double best = std::min(max_range, detail::ray_boundary(map_.bounds, map_.ground_z, origin, dir));

    auto test_bucket = [&](int bx, int by) {
        const auto b = static_cast<std::size_t>(by) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(bx);
        for (std::size_t k = offsets_[b]; k < offsets_[b + 1]; ++k)
            best = std::min(best, detail::ray_cylinder(origin, dir, map_.cylinders[static_cast<std::size_t>(entries_[k])], map_.ground_z));
    };

    int bx = bucket_x(origin.x());
    int by = bucket_y(origin.y());
    const double dx = dir.x(), dy = dir.y();
    if (dx == 0.0 && dy == 0.0) {
        test_bucket(bx, by);
        return best;
    }
    // 2D DDA over buckets, parameterised by the 3D ray distance.
    const int step_x = dx > 0.0 ? 1 : -1;
    const int step_y = dy > 0.0 ? 1 : -1;
    const double inf = detail::kNoHit;
    double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
    if (dx != 0.0) {
        const double edge = map_.bounds.min_x + (bx + (dx > 0.0 ? 1 : 0)) * bucket_size_;
        t_max_x = (edge - origin.x()) / dx;
        t_delta_x = bucket_size_ / std::abs(dx);
    }
    if (dy != 0.0) {
        const double edge = map_.bounds.min_y + (by + (dy > 0.0 ? 1 : 0)) * bucket_size_;
        t_max_y = (edge - origin.y()) / dy;
        t_delta_y = bucket_size_ / std::abs(dy);
    }
    double t_enter = 0.0;
    while (t_enter <= best) {
        test_bucket(bx, by);
        if (t_max_x < t_max_y) {
            t_enter = t_max_x;
            t_max_x += t_delta_x;
            bx += step_x;
        } else {
            t_enter = t_max_y;
            t_max_y += t_delta_y;
            by += step_y;
        }
        if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) break;
    }
    return best;
}

std::optional<Contact> Scene::check_collision(const Vec3& position, double d_drone) const {
    const double inflation = 0.5 * d_drone;
    int best = -1;
    for_each_in_box(position.x() - inflation, position.y() - inflation, position.x() + inflation,
                    position.y() + inflation, [&](int i) {
                        if ((best < 0 || i < best) &&
                            detail::point_in_cylinder(position, map_.cylinders[static_cast<std::size_t>(i)], map_.ground_z, inflation))
                            best = i;
                    });
    if (best >= 0)
        return detail::cylinder_contact(map_.cylinders[static_cast<std::size_t>(best)], best, map_.ground_z, position, 0.0);
    if (const int wall = detail::point_near_wall(map_.bounds, position, inflation); wall >= 0)
        return detail::wall_contact(map_.bounds, wall, position, 0.0);
    return std::nullopt;
}

std::optional<Contact> Scene::swept_collision(const Vec3& p0, const Vec3& p1, double d_drone) const {
    const double inflation = 0.5 * d_drone;
    double best_t = detail::kNoHit;
    int best_index = Contact::kBoundary;
    for_each_in_box(std::min(p0.x(), p1.x()) - inflation, std::min(p0.y(), p1.y()) - inflation,
                    std::max(p0.x(), p1.x()) + inflation, std::max(p0.y(), p1.y()) + inflation,
                    [&](int i) {
                        const auto t = detail::segment_cylinder(p0, p1, map_.cylinders[static_cast<std::size_t>(i)], map_.ground_z, inflation);
                        if (t && (*t < best_t || (*t == best_t && i < best_index))) {
                            best_t = *t;
                            best_index = i;
                        }
                    });
    const auto wall = detail::segment_walls(map_.bounds, p0, p1, inflation);
    if (wall && wall->first < best_t) {
        const Vec3 at = p0 + wall->first * (p1 - p0);
        return detail::wall_contact(map_.bounds, wall->second, at, wall->first);
    }
    if (best_index == Contact::kBoundary) return std::nullopt;
    const Vec3 at = p0 + best_t * (p1 - p0);
    return detail::cylinder_contact(map_.cylinders[static_cast<std::size_t>(best_index)], best_index, map_.ground_z, at, best_t);
}

}  // namespace gapbench
