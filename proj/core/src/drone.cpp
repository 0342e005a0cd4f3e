#include "gapbench/drone.hpp"

#include <cmath>
#include <string>

#include "gapbench/errors.hpp"

namespace gapbench {

void DroneParams::validate() const {
    if (!(d_drone > 0.0) || !(v_max > 0.0) || !(a_max > 0.0) || !(velocity_time_constant > 0.0))
        throw DomainError("drone parameters must be positive");
}

void CameraModel::validate() const {
    if (width < 1 || height < 1) throw DomainError("camera resolution must be positive");
    if (!(horizontal_fov > 0.0 && horizontal_fov < kPi)) throw DomainError("camera fov must lie in (0, pi)");
    if (!(max_range > 0.0)) throw DomainError("camera max_range must be positive");
    if (!(rate > 0.0)) throw DomainError("camera rate must be positive");
}

double CameraModel::focal_length() const { return 0.5 * width / std::tan(0.5 * horizontal_fov); }

double CameraModel::vertical_fov() const { return 2.0 * std::atan(0.5 * height / focal_length()); }

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Finished: return "finished";
        case Outcome::Collision: return "collision";
        case Outcome::Timeout: return "timeout";
        case Outcome::Fault: return "fault";
    }
    return "fault";
}

Outcome outcome_from_string(std::string_view name) {
    if (name == "finished") return Outcome::Finished;
    if (name == "collision") return Outcome::Collision;
    if (name == "timeout") return Outcome::Timeout;
    if (name == "fault") return Outcome::Fault;
    throw std::invalid_argument("unknown outcome '" + std::string(name) + "'");
}

}  // namespace gapbench
