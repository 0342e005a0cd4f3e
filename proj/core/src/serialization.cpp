#include "gapbench/serialization.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gapbench/errors.hpp"

namespace gapbench {

using nlohmann::json;

namespace {

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
Vec3 vec3_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

json to_json(const ObstacleMap& map) {
    json cylinders = json::array();
    for (const auto& c : map.cylinders)
        cylinders.push_back({{"center", json::array({c.center.x(), c.center.y()})},
                             {"radius", c.radius},
                             {"height", c.height},
                             {"site", c.site}});
    return {{"bounds", json::array({map.bounds.min_x, map.bounds.min_y, map.bounds.max_x, map.bounds.max_y})},
            {"ground_z", map.ground_z},
            {"map_seed", map.map_seed},
            {"cylinders", std::move(cylinders)}};
}

ObstacleMap obstacle_map_from_json(const json& j) {
    ObstacleMap map;
    const json& b = j.at("bounds");
    map.bounds = Bounds{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
    map.ground_z = j.at("ground_z").get<double>();
    map.map_seed = j.at("map_seed").get<std::uint64_t>();
    for (const auto& c : j.at("cylinders")) {
        Cylinder cyl;
        cyl.center = Vec2(c.at("center").at(0).get<double>(), c.at("center").at(1).get<double>());
        cyl.radius = c.at("radius").get<double>();
        cyl.height = c.at("height").get<double>();
        cyl.site = c.value("site", -1);
        map.cylinders.push_back(cyl);
    }
    return map;
}

json to_json(const TrialSpec& t) {
    return {{"start", vec3(t.start)}, {"goal", vec3(t.goal)}, {"max_time", t.max_time}, {"trial_seed", t.trial_seed}};
}

TrialSpec trial_spec_from_json(const json& j) {
    return TrialSpec{vec3_from(j.at("start")), vec3_from(j.at("goal")), j.at("max_time").get<double>(),
                     j.at("trial_seed").get<std::uint64_t>()};
}

json to_json(const EnvMetrics& e) {
    return {{"trav", e.trav},
            {"trav_max", e.trav_max},
            {"p_tau", e.p_tau},
            {"rgs", e.rgs},
            {"mean_obstacle_width", e.mean_obstacle_width},
            {"sample_points", e.sample_points},
            {"skipped_points", e.skipped_points}};
}

EnvMetrics env_metrics_from_json(const json& j) {
    EnvMetrics e;
    e.trav = j.at("trav").get<double>();
    e.trav_max = j.at("trav_max").get<double>();
    e.p_tau = j.at("p_tau").get<double>();
    e.rgs = j.at("rgs").get<double>();
    e.mean_obstacle_width = j.at("mean_obstacle_width").get<double>();
    e.sample_points = j.at("sample_points").get<int>();
    e.skipped_points = j.at("skipped_points").get<int>();
    return e;
}

json to_json(const Contact& c) {
    return {{"point", vec3(c.point)},
            {"obstacle_index", c.obstacle_index},
            {"drone_position", vec3(c.drone_position)},
            {"fraction", c.fraction}};
}

Contact contact_from_json(const json& j) {
    return Contact{vec3_from(j.at("point")), j.at("obstacle_index").get<int>(), vec3_from(j.at("drone_position")),
                   j.at("fraction").get<double>()};
}

std::string format_sig9(double value) { return fmt::format("{:.9g}", value); }

std::string trajectory_csv(const std::vector<DroneState>& states) {
    std::string out = "t,px,py,pz,vx,vy,vz,ax,ay,az\n";
    for (const auto& s : states) {
        out += format_sig9(s.t);
        for (const Vec3* v : {&s.position, &s.velocity, &s.acceleration})
            for (int i = 0; i < 3; ++i) {
                out += ',';
                out += format_sig9((*v)[i]);
            }
        out += '\n';
    }
    return out;
}

std::vector<DroneState> parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,px,py,pz,vx,vy,vz,ax,ay,az")
        throw std::runtime_error("trajectory table has an unexpected header");
    std::vector<DroneState> states;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[10];
        std::size_t pos = 0;
        for (int i = 0; i < 10; ++i) {
            const std::size_t end = line.find(',', pos);
            if ((end == std::string::npos) != (i == 9)) throw std::runtime_error("trajectory row has wrong column count");
            v[i] = std::stod(line.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
            pos = end + 1;
        }
        DroneState s;
        s.t = v[0];
        s.position = Vec3(v[1], v[2], v[3]);
        s.velocity = Vec3(v[4], v[5], v[6]);
        s.acceleration = Vec3(v[7], v[8], v[9]);
        states.push_back(s);
    }
    return states;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << contents;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

}  // namespace gapbench
