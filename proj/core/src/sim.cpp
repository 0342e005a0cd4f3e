#include "gapbench/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "gapbench/errors.hpp"

namespace gapbench {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (!(goal_tolerance > 0.0)) throw DomainError("goal tolerance must be positive");
    if (!(watchdog > 0.0)) throw DomainError("watchdog must be positive");
    camera.validate();
    drone.validate();
}

int SimConfig::steps_per_frame() const {
    return std::max(1, static_cast<int>(std::lround(1.0 / (camera.rate * dt))));
}

namespace {

Vec3 clamp_norm(const Vec3& v, double limit) {
    const double n = v.norm();
    return n > limit ? Vec3(v * (limit / n)) : v;
}

Vec3 commanded_velocity(const DroneState& state, const Command& command, const DroneParams& drone) {
    if (command.kind == CommandKind::Velocity) return clamp_norm(command.vector, drone.v_max);
    const Vec3 to_target = command.vector - state.position;
    return clamp_norm(to_target / drone.velocity_time_constant, drone.v_max);
}

}  // namespace

StepResult step(const DroneState& state, const Command& command, double dt, const DroneParams& drone,
                const Scene& scene) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (!command.finite()) throw AlgorithmFault("algorithm fault: non-finite command");

    const Vec3 v_cmd = commanded_velocity(state, command, drone);
    const Vec3 a = clamp_norm((v_cmd - state.velocity) / drone.velocity_time_constant, drone.a_max);
    const Vec3 v = clamp_norm(state.velocity + a * dt, drone.v_max);

    StepResult out;
    out.state.t = state.t + dt;
    out.state.velocity = v;
    out.state.acceleration = (v - state.velocity) / dt;
    out.state.position = state.position + v * dt;
    const double planar = std::hypot(v.x(), v.y());
    out.state.yaw = planar > 0.05 ? std::atan2(v.y(), v.x()) : state.yaw;
    out.contact = scene.swept_collision(state.position, out.state.position, drone.d_drone);
    return out;
}

Vec3 pixel_ray(const CameraModel& camera, double yaw, int row, int col) {
    const double f = camera.focal_length();
    const double u = (col + 0.5 - 0.5 * camera.width) / f;   // to the right
    const double v = (0.5 * camera.height - (row + 0.5)) / f;  // up
    const Vec3 forward(std::cos(yaw), std::sin(yaw), 0.0);
    const Vec3 right(std::sin(yaw), -std::cos(yaw), 0.0);
    return (forward + u * right + v * Vec3::UnitZ()).normalized();
}

DepthImage render_depth(const Scene& scene, const Vec3& position, double yaw, const CameraModel& camera) {
    DepthImage img;
    img.width = camera.width;
    img.height = camera.height;
    img.depth.resize(static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height));
    // Smallest positive depth; a pixel starting inside an obstacle reports this.
    constexpr float kMinDepth = 1e-3f;
    for (int r = 0; r < camera.height; ++r) {
        for (int c = 0; c < camera.width; ++c) {
            const double d = scene.ray_cast(position, pixel_ray(camera, yaw, r, c), camera.max_range);
            img.depth[static_cast<std::size_t>(r) * static_cast<std::size_t>(camera.width) + static_cast<std::size_t>(c)] =
                std::max(kMinDepth, static_cast<float>(d));
        }
    }
    return img;
}

double travelled_distance(const std::vector<DroneState>& states) {
    double d = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) d += (states[k].position - states[k - 1].position).norm();
    return d;
}

TrialRecord run_trial(const Scene& scene, const TrialSpec& trial, Algorithm& algorithm, const SimConfig& cfg,
                      std::uint64_t trial_id, std::optional<double> d_min) {
    cfg.validate();
    using Clock = std::chrono::steady_clock;

    TrialRecord record;
    record.trial = trial;
    record.d_min = d_min;

    DroneState state;
    state.position = trial.start;
    const Vec3 to_goal = trial.goal - trial.start;
    state.yaw = std::atan2(to_goal.y(), to_goal.x());
    record.states.push_back(state);

    const int frame_steps = cfg.steps_per_frame();
    const bool wants_depth = algorithm.needs_depth();
    Command command;  // hover until the first command arrives
    bool started = false;

    auto fault = [&](std::string message) {
        record.outcome = Outcome::Fault;
        record.fault = std::move(message);
    };

    try {
        algorithm.on_trial_start(TrialInfo{trial_id, trial});
        started = true;
        for (long k = 0;; ++k) {
            if (k % frame_steps == 0) {
                Observation obs;
                obs.t = state.t;
                obs.state = state;
                obs.goal = trial.goal;
                obs.camera = cfg.camera;
                if (wants_depth) obs.depth = render_depth(scene, state.position, state.yaw, cfg.camera);
                const auto t0 = Clock::now();
                command = algorithm.compute_command(obs);
                const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
                record.commands.push_back({state.t, elapsed, command.self_reported_processing});
                if (elapsed > cfg.watchdog)
                    throw AlgorithmFault(fmt::format("algorithm fault: command took {:.3f} s (watchdog {:.3f} s)",
                                                     elapsed, cfg.watchdog));
            }
            StepResult next = step(state, command, cfg.dt, cfg.drone, scene);
            // Time from the step counter, not accumulated, so it is exact and increasing.
            next.state.t = static_cast<double>(k + 1) * cfg.dt;
            state = next.state;
            record.states.push_back(state);
            if (next.contact) {
                record.outcome = Outcome::Collision;
                record.contact = next.contact;
                break;
            }
            if ((state.position - trial.goal).norm() <= cfg.goal_tolerance) {
                record.outcome = Outcome::Finished;
                break;
            }
            if (state.t >= trial.max_time) {
                record.outcome = Outcome::Timeout;
                break;
            }
        }
    } catch (const AlgorithmFault& e) {
        fault(e.what());
    } catch (const std::exception& e) {
        fault(std::string("algorithm fault: ") + e.what());
    }

    record.t_trial = state.t;
    record.d_trav = travelled_distance(record.states);
    if (started) {
        try {
            algorithm.on_trial_end(record.outcome);
        } catch (const std::exception& e) {
            if (record.outcome != Outcome::Fault) fault(std::string("algorithm fault: ") + e.what());
        }
    }
    return record;
}

}  // namespace gapbench
