#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapbench/algorithm.hpp"
#include "gapbench/scene.hpp"

namespace gapbench {

struct SimConfig {
    double dt = 0.01;
    CameraModel camera;
    DroneParams drone;
    double goal_tolerance = 1.0;
    double watchdog = 1.0;  // max seconds per compute_command

    void validate() const;
    /// Physics steps between camera frames.
    [[nodiscard]] int steps_per_frame() const;
};

struct CommandTiming {
    double t_issued = 0.0;
    double processing = 0.0;  // wall clock measured by the runner, s
    std::optional<double> self_reported;
};

struct TrialRecord {
    Outcome outcome = Outcome::Timeout;
    std::vector<DroneState> states;
    std::vector<CommandTiming> commands;
    double t_trial = 0.0;
    double d_trav = 0.0;
    std::optional<double> d_min;
    TrialSpec trial;
    std::optional<Contact> contact;
    std::string fault;  // set when outcome == Fault
};

struct StepResult {
    DroneState state;
    std::optional<Contact> contact;  // first contact along the step, if any
};

/// Point-mass update: the commanded velocity (clamped to v_max) is tracked
/// through a first-order lag whose acceleration is clamped to a_max; position
/// integrates the new velocity. The step segment is swept for collisions.
/// Throws AlgorithmFault on a non-finite command.
[[nodiscard]] StepResult step(const DroneState& state, const Command& command, double dt,
                              const DroneParams& drone, const Scene& scene);

/// Unit direction of the ray through the centre of pixel (row, col) for a
/// level camera at the given yaw.
[[nodiscard]] Vec3 pixel_ray(const CameraModel& camera, double yaw, int row, int col);

/// Pinhole range image: one analytic ray per pixel.
[[nodiscard]] DepthImage render_depth(const Scene& scene, const Vec3& position, double yaw,
                                      const CameraModel& camera);

/// Lock-step trial: the simulation clock stops while the algorithm computes.
/// Algorithm exceptions, watchdog overruns and non-finite commands end the
/// trial with Outcome::Fault. d_min is copied into the record unchanged.
[[nodiscard]] TrialRecord run_trial(const Scene& scene, const TrialSpec& trial, Algorithm& algorithm,
                                    const SimConfig& cfg, std::uint64_t trial_id = 0,
                                    std::optional<double> d_min = std::nullopt);

/// Σ‖p_{k+1} − p_k‖ over the recorded states.
[[nodiscard]] double travelled_distance(const std::vector<DroneState>& states);

}  // namespace gapbench
