#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gapbench/drone.hpp"
#include "gapbench/map_gen.hpp"

namespace gapbench {

inline constexpr int kProtocolVersion = 1;

/// Sent once before any trial: what the algorithm is flying.
struct Handshake {
    int version = kProtocolVersion;
    std::string identity;  // benchmark identity
    CameraModel camera;
    DroneParams drone;
    Bounds bounds;
    double altitude = 1.5;

    friend bool operator==(const Handshake&, const Handshake&) = default;
};

struct TrialInfo {
    std::uint64_t trial_id = 0;
    TrialSpec spec;

    friend bool operator==(const TrialInfo&, const TrialInfo&) = default;
};

struct Observation {
    double t = 0.0;
    DroneState state;
    Vec3 goal = Vec3::Zero();
    DepthImage depth;  // empty when the algorithm declared it does not need depth
    CameraModel camera;

    friend bool operator==(const Observation&, const Observation&) = default;
};

enum class CommandKind { Velocity, Waypoint };

struct Command {
    CommandKind kind = CommandKind::Velocity;
    Vec3 vector = Vec3::Zero();  // m/s for Velocity, m (map frame) for Waypoint
    double issued_at = 0.0;
    std::optional<double> self_reported_processing;

    [[nodiscard]] bool finite() const { return vector.allFinite() && std::isfinite(issued_at); }

    friend bool operator==(const Command&, const Command&) = default;
};

/// Contract for an obstacle-avoidance algorithm under test. Per trial the
/// runner calls on_trial_start, then compute_command once per camera frame,
/// then on_trial_end. on_handshake precedes the first trial.
class Algorithm {
public:
    virtual ~Algorithm() = default;

    [[nodiscard]] virtual std::string identity() const = 0;
    /// False lets the runner skip depth rendering for this algorithm.
    [[nodiscard]] virtual bool needs_depth() const { return true; }

    virtual void on_handshake(const Handshake& /*handshake*/) {}
    virtual void on_trial_start(const TrialInfo& /*trial*/) {}
    virtual Command compute_command(const Observation& observation) = 0;
    virtual void on_trial_end(Outcome /*outcome*/) {}
};

using AlgorithmFactory = std::function<std::unique_ptr<Algorithm>()>;

}  // namespace gapbench
