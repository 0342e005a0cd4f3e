#pragma once

#include <string_view>
#include <vector>

#include "gapbench/types.hpp"

namespace gapbench {

struct DroneParams {
    double d_drone = 0.6;  // collision sphere diameter, m
    double v_max = 3.0;    // m/s
    double a_max = 6.0;    // m/s^2
    // First-order velocity tracking time constant, s.
    double velocity_time_constant = 0.2;

    void validate() const;

    friend bool operator==(const DroneParams&, const DroneParams&) = default;
};

struct DroneState {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    // Acceleration applied over the step that produced this state.
    Vec3 acceleration = Vec3::Zero();
    // Camera heading in the horizontal plane, rad. Follows the velocity direction.
    double yaw = 0.0;

    friend bool operator==(const DroneState&, const DroneState&) = default;
};

struct CameraModel {
    int width = 160;
    int height = 120;
    double horizontal_fov = kPi / 2.0;
    double max_range = 20.0;
    double rate = 20.0;  // Hz

    void validate() const;
    [[nodiscard]] double focal_length() const;  // pixels
    [[nodiscard]] double vertical_fov() const;

    friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

/// Ray range per pixel, row-major, row 0 at the top. Values in (0, max_range];
/// max_range also encodes "nothing in range".
struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<float> depth;

    [[nodiscard]] float at(int row, int col) const {
        return depth[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
    }
    [[nodiscard]] bool empty() const { return depth.empty(); }

    friend bool operator==(const DepthImage&, const DepthImage&) = default;
};

enum class Outcome { Finished, Collision, Timeout, Fault };

[[nodiscard]] std::string_view to_string(Outcome outcome);
[[nodiscard]] Outcome outcome_from_string(std::string_view name);

}  // namespace gapbench
