#include "gapbench/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapbench/sim.hpp"

namespace gapbench {
namespace {

Vec3 goal_velocity(const Observation& obs, double speed) {
    const Vec3 to_goal = obs.goal - obs.state.position;
    const double n = to_goal.norm();
    return n > 0.0 ? Vec3(to_goal * (speed / n)) : Vec3::Zero();
}

}  // namespace

Command StraightLineBaseline::command_for(const Observation& obs, double v_max) {
    return Command{CommandKind::Velocity, goal_velocity(obs, v_max), obs.t, std::nullopt};
}

Command StraightLineBaseline::compute_command(const Observation& obs) { return command_for(obs, v_max_); }

Command HoverBaseline::compute_command(const Observation& obs) {
    return Command{CommandKind::Velocity, Vec3::Zero(), obs.t, std::nullopt};
}

Command ReactiveDodger::command_for(const Observation& obs, const DroneParams& drone, const ReactiveParams& p) {
    const DepthImage& img = obs.depth;
    if (img.empty()) return StraightLineBaseline::command_for(obs, drone.v_max);

    // Horizon scan: nearest return per column, as points in the body frame (x forward, y left).
    const CameraModel& cam = obs.camera;
    const int mid = img.height / 2;
    const int r0 = std::max(0, mid - p.band_rows);
    const int r1 = std::min(img.height, mid + p.band_rows);
    std::vector<Vec2> points;
    for (int c = 0; c < img.width; ++c) {
        double depth = cam.max_range;
        for (int r = r0; r < r1; ++r) depth = std::min(depth, static_cast<double>(img.at(r, c)));
        if (depth >= cam.max_range * (1.0 - 1e-6)) continue;
        const Vec3 ray = pixel_ray(cam, 0.0, mid, c);
        points.push_back(depth * Vec2(ray.x(), ray.y()).normalized());
    }

    const double safety = 0.5 * drone.d_drone + p.margin;
    auto free_distance = [&](double heading) {
        const Vec2 dir(std::cos(heading), std::sin(heading));
        double best = cam.max_range;
        for (const Vec2& q : points) {
            const double along = q.dot(dir);
            const double lateral = std::abs(dir.x() * q.y() - dir.y() * q.x());
            if (along <= 0.0 || lateral >= safety) continue;
            best = std::min(best, std::max(0.0, along - std::sqrt(safety * safety - lateral * lateral)));
        }
        return best;
    };

    const Vec3 to_goal = obs.goal - obs.state.position;
    const double goal_distance = std::hypot(to_goal.x(), to_goal.y());
    const double wanted = std::min(p.look_ahead, goal_distance);
    const double goal_bearing = std::remainder(std::atan2(to_goal.y(), to_goal.x()) - obs.state.yaw, 2.0 * kPi);
    const double half_fov = 0.5 * cam.horizontal_fov;

    if (std::abs(goal_bearing) <= half_fov && free_distance(goal_bearing) >= wanted)
        return StraightLineBaseline::command_for(obs, drone.v_max);

    double chosen = 0.0, chosen_free = -1.0, chosen_error = std::numeric_limits<double>::infinity();
    double widest = 0.0, widest_free = -1.0;
    for (int i = 0; i < p.headings; ++i) {
        const double heading = -half_fov + cam.horizontal_fov * i / std::max(1, p.headings - 1);
        const double free = free_distance(heading);
        if (free > widest_free) {
            widest = heading;
            widest_free = free;
        }
        const double error = std::abs(heading - goal_bearing);
        if (free >= wanted && error < chosen_error) {
            chosen = heading;
            chosen_free = free;
            chosen_error = error;
        }
    }
    if (chosen_free < 0.0) {
        chosen = widest;
        chosen_free = widest_free;
    }

    const double speed = drone.v_max * std::clamp(chosen_free / p.look_ahead, p.min_speed_fraction, 1.0);
    const double yaw = obs.state.yaw + chosen;
    Vec3 v(speed * std::cos(yaw), speed * std::sin(yaw), 0.0);
    v.z() = goal_velocity(obs, drone.v_max).z();
    return Command{CommandKind::Velocity, v, obs.t, std::nullopt};
}

Command ReactiveDodger::compute_command(const Observation& obs) { return command_for(obs, drone_, params_); }

std::vector<std::string_view> builtin_algorithm_names() { return {"straight-line", "hover", "reactive"}; }

AlgorithmFactory builtin_algorithm(std::string_view name) {
    if (name == "straight-line") return [] { return std::make_unique<StraightLineBaseline>(); };
    if (name == "hover") return [] { return std::make_unique<HoverBaseline>(); };
    if (name == "reactive") return [] { return std::make_unique<ReactiveDodger>(); };
    throw std::invalid_argument("unknown built-in algorithm '" + std::string(name) + "'");
}

}  // namespace gapbench
