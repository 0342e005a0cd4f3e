#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "gapbench/algorithm.hpp"

namespace gapbench {

/// Flies at v_max straight at the goal and ignores the depth image.
class StraightLineBaseline final : public Algorithm {
public:
    [[nodiscard]] std::string identity() const override { return "straight-line"; }
    [[nodiscard]] bool needs_depth() const override { return false; }
    void on_handshake(const Handshake& handshake) override { v_max_ = handshake.drone.v_max; }
    Command compute_command(const Observation& obs) override;

    /// Pure form used by the class and by the reference external agent.
    static Command command_for(const Observation& obs, double v_max);

private:
    double v_max_ = DroneParams{}.v_max;
};

/// Commands zero velocity forever.
class HoverBaseline final : public Algorithm {
public:
    [[nodiscard]] std::string identity() const override { return "hover"; }
    [[nodiscard]] bool needs_depth() const override { return false; }
    Command compute_command(const Observation& obs) override;
};

struct ReactiveParams {
    double look_ahead = 1.5;      // clear distance wanted along the chosen heading, m
    double margin = 0.05;         // clearance beyond the drone radius, m
    int headings = 61;            // candidate headings across the field of view
    double min_speed_fraction = 1.0;  // of v_max, reached when the chosen corridor is blocked
    int band_rows = 2;            // rows above and below the horizon line
};

/// Depth-reactive baseline. The horizon band of the depth image is turned
/// into a polar scan; each candidate heading in the field of view gets the
/// free distance of a corridor one drone width plus margin wide. The clear
/// heading nearest the goal bearing wins; speed scales with its free distance
/// down to a floor. With the goal bearing clear it flies exactly like the
/// straight-line baseline.
class ReactiveDodger final : public Algorithm {
public:
    explicit ReactiveDodger(ReactiveParams params = {}) : params_(params) {}

    [[nodiscard]] std::string identity() const override { return "reactive"; }
    void on_handshake(const Handshake& handshake) override { drone_ = handshake.drone; }
    Command compute_command(const Observation& obs) override;

    static Command command_for(const Observation& obs, const DroneParams& drone, const ReactiveParams& params);

private:
    ReactiveParams params_;
    DroneParams drone_;
};

/// "straight-line", "hover", "reactive".
[[nodiscard]] std::vector<std::string_view> builtin_algorithm_names();
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] AlgorithmFactory builtin_algorithm(std::string_view name);

}  // namespace gapbench
