#include "gapbench/wire.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include <absl/strings/escaping.h>
#include <nlohmann/json.hpp>

#include "gapbench/errors.hpp"

namespace gapbench::wire {
namespace {

using nlohmann::json;

double finite(double x, const char* field) {
    if (!std::isfinite(x)) throw ProtocolError(std::string("non-finite value in field '") + field + "'");
    return x;
}

json vec(const Vec3& v, const char* field) {
    return json::array({finite(v.x(), field), finite(v.y(), field), finite(v.z(), field)});
}

Vec3 vec_from(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ProtocolError("expected a 3-element array");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json camera_json(const CameraModel& c) {
    return {{"width", c.width}, {"height", c.height}, {"horizontal_fov", c.horizontal_fov},
            {"max_range", c.max_range}, {"rate", c.rate}};
}

CameraModel camera_from(const json& j) {
    CameraModel c;
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    c.horizontal_fov = j.at("horizontal_fov").get<double>();
    c.max_range = j.at("max_range").get<double>();
    c.rate = j.at("rate").get<double>();
    return c;
}

json state_json(const DroneState& s) {
    return {{"t", finite(s.t, "state.t")},
            {"position", vec(s.position, "state.position")},
            {"velocity", vec(s.velocity, "state.velocity")},
            {"acceleration", vec(s.acceleration, "state.acceleration")},
            {"yaw", finite(s.yaw, "state.yaw")}};
}

DroneState state_from(const json& j) {
    DroneState s;
    s.t = j.at("t").get<double>();
    s.position = vec_from(j.at("position"));
    s.velocity = vec_from(j.at("velocity"));
    s.acceleration = vec_from(j.at("acceleration"));
    s.yaw = j.at("yaw").get<double>();
    return s;
}

std::string pack_floats(const std::vector<float>& values) {
    std::string bytes(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(values[i]);
        for (int b = 0; b < 4; ++b) bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    return bytes;
}

std::vector<float> unpack_floats(std::string_view bytes) {
    std::vector<float> values(bytes.size() / 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + static_cast<std::size_t>(b)])) << (8 * b);
        values[i] = std::bit_cast<float>(bits);
    }
    return values;
}

json depth_json(const DepthImage& d) {
    return {{"width", d.width}, {"height", d.height}, {"encoding", "f32le-base64"},
            {"data", absl::Base64Escape(pack_floats(d.depth))}};
}

DepthImage depth_from(const json& j) {
    DepthImage d;
    d.width = j.at("width").get<int>();
    d.height = j.at("height").get<int>();
    if (j.at("encoding").get<std::string>() != "f32le-base64") throw ProtocolError("unsupported depth encoding");
    std::string raw;
    if (!absl::Base64Unescape(j.at("data").get<std::string>(), &raw)) throw ProtocolError("depth data is not valid base64");
    if (d.width < 0 || d.height < 0 ||
        raw.size() != static_cast<std::size_t>(d.width) * static_cast<std::size_t>(d.height) * 4)
        throw ProtocolError("depth data size does not match width x height");
    d.depth = unpack_floats(raw);
    return d;
}

json to_json(const Handshake& h) {
    return {{"type", "handshake"},
            {"version", h.version},
            {"identity", h.identity},
            {"camera", camera_json(h.camera)},
            {"drone", {{"d_drone", h.drone.d_drone}, {"v_max", h.drone.v_max}, {"a_max", h.drone.a_max},
                       {"velocity_time_constant", h.drone.velocity_time_constant}}},
            {"bounds", json::array({h.bounds.min_x, h.bounds.min_y, h.bounds.max_x, h.bounds.max_y})},
            {"altitude", h.altitude}};
}

json to_json(const HandshakeAck& a) {
    return {{"type", "handshake_ack"}, {"version", a.version}, {"identity", a.identity}};
}

json to_json(const TrialInfo& t) {
    return {{"type", "trial_start"},
            {"trial_id", t.trial_id},
            {"start", vec(t.spec.start, "start")},
            {"goal", vec(t.spec.goal, "goal")},
            {"max_time", finite(t.spec.max_time, "max_time")},
            {"trial_seed", t.spec.trial_seed}};
}

json to_json(const Observation& o) {
    json j = {{"type", "observation"},
              {"t", finite(o.t, "t")},
              {"state", state_json(o.state)},
              {"goal", vec(o.goal, "goal")},
              {"camera", camera_json(o.camera)}};
    j["depth"] = o.depth.empty() ? json(nullptr) : depth_json(o.depth);
    return j;
}

json to_json(const Command& c) {
    json j = {{"type", "command"},
              {"kind", c.kind == CommandKind::Velocity ? "velocity" : "waypoint"},
              {"vector", vec(c.vector, "vector")},
              {"issued_at", finite(c.issued_at, "issued_at")}};
    if (c.self_reported_processing) j["processing"] = finite(*c.self_reported_processing, "processing");
    return j;
}

json to_json(const TrialEnd& e) {
    return {{"type", "trial_end"}, {"trial_id", e.trial_id}, {"outcome", std::string(to_string(e.outcome))}};
}

json to_json(const Fault& f) { return {{"type", "fault"}, {"message", f.message}}; }

Message from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "handshake") {
        Handshake h;
        h.version = j.at("version").get<int>();
        h.identity = j.at("identity").get<std::string>();
        h.camera = camera_from(j.at("camera"));
        const json& d = j.at("drone");
        h.drone = DroneParams{d.at("d_drone").get<double>(), d.at("v_max").get<double>(), d.at("a_max").get<double>(),
                              d.at("velocity_time_constant").get<double>()};
        const json& b = j.at("bounds");
        if (!b.is_array() || b.size() != 4) throw ProtocolError("bounds must be [min_x, min_y, max_x, max_y]");
        h.bounds = Bounds{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(), b.at(3).get<double>()};
        h.altitude = j.at("altitude").get<double>();
        return h;
    }
    if (type == "handshake_ack") return HandshakeAck{j.at("version").get<int>(), j.at("identity").get<std::string>()};
    if (type == "trial_start") {
        TrialInfo t;
        t.trial_id = j.at("trial_id").get<std::uint64_t>();
        t.spec.start = vec_from(j.at("start"));
        t.spec.goal = vec_from(j.at("goal"));
        t.spec.max_time = j.at("max_time").get<double>();
        t.spec.trial_seed = j.at("trial_seed").get<std::uint64_t>();
        return t;
    }
    if (type == "observation") {
        Observation o;
        o.t = j.at("t").get<double>();
        o.state = state_from(j.at("state"));
        o.goal = vec_from(j.at("goal"));
        o.camera = camera_from(j.at("camera"));
        if (!j.at("depth").is_null()) o.depth = depth_from(j.at("depth"));
        return o;
    }
    if (type == "command") {
        Command c;
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "velocity") c.kind = CommandKind::Velocity;
        else if (kind == "waypoint") c.kind = CommandKind::Waypoint;
        else throw ProtocolError("unknown command kind '" + kind + "'");
        c.vector = vec_from(j.at("vector"));
        c.issued_at = j.at("issued_at").get<double>();
        if (j.contains("processing") && !j.at("processing").is_null()) c.self_reported_processing = j.at("processing").get<double>();
        return c;
    }
    if (type == "trial_end") return TrialEnd{j.at("trial_id").get<std::uint64_t>(), outcome_from_string(j.at("outcome").get<std::string>())};
    if (type == "fault") return Fault{j.at("message").get<std::string>()};
    throw ProtocolError("unknown message type '" + type + "'");
}

std::uint32_t read_length(std::string_view bytes) {
    std::uint32_t n = 0;
    for (int b = 0; b < 4; ++b) n |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[static_cast<std::size_t>(b)])) << (8 * b);
    return n;
}

}  // namespace

std::string_view type_name(const Message& message) {
    static constexpr std::string_view names[] = {"handshake", "handshake_ack", "trial_start", "observation",
                                                 "command", "trial_end", "fault"};
    return names[message.index()];
}

std::string encode_body(const Message& message) {
    return std::visit([](const auto& m) { return to_json(m).dump(); }, message);
}

Message decode_body(std::string_view body) {
    try {
        const json j = json::parse(body);
        if (!j.is_object()) throw ProtocolError("message body must be a JSON object");
        return from_json(j);
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what());
    }
}

std::string encode_frame(const Message& message) {
    const std::string body = encode_body(message);
    if (body.size() > kMaxFrameBytes) throw ProtocolError("message exceeds maximum frame size");
    std::string frame(4, '\0');
    const auto n = static_cast<std::uint32_t>(body.size());
    for (int b = 0; b < 4; ++b) frame[static_cast<std::size_t>(b)] = static_cast<char>((n >> (8 * b)) & 0xFFu);
    frame += body;
    return frame;
}

Message decode_frame(std::string_view frame) {
    if (frame.size() < 4) throw ProtocolError("frame shorter than its length prefix");
    const std::uint32_t n = read_length(frame);
    if (n > kMaxFrameBytes) throw ProtocolError("frame length exceeds maximum frame size");
    if (static_cast<std::size_t>(n) != frame.size() - 4) throw ProtocolError("frame length prefix does not match frame size");
    return decode_body(frame.substr(4));
}

std::optional<Message> FrameReader::next() {
    if (buffer_.size() < 4) return std::nullopt;
    const std::uint32_t n = read_length(buffer_);
    if (n > kMaxFrameBytes) throw ProtocolError("frame length exceeds maximum frame size");
    if (buffer_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
    Message m = decode_body(std::string_view(buffer_).substr(4, n));
    buffer_.erase(0, 4 + static_cast<std::size_t>(n));
    return m;
}

std::string_view protocol_grammar() {
    static constexpr std::string_view kGrammar = R"(# Algorithm wire protocol (version 1)

## Framing

Every message is one frame:

    [length: 4 bytes, unsigned, little-endian][body: length bytes, UTF-8 JSON object]

Maximum body length is 67108864 bytes. A frame whose prefix does not match
the bytes that follow is a protocol error; the benchmark aborts the trial as
an algorithm fault.

All quantities are SI: metres, seconds, radians, m/s, m/s^2. Vectors are JSON
arrays [x, y, z] in the map frame (z up). Numbers are finite; floats are
written with enough digits to round-trip exactly.

## Session

    benchmark -> algorithm   handshake
    algorithm -> benchmark   handshake_ack        (version must equal 1)
    per trial:
      benchmark -> algorithm   trial_start
      repeat, lock-step, once per camera frame:
        benchmark -> algorithm   observation
        algorithm -> benchmark   command | fault
      benchmark -> algorithm   trial_end
    the benchmark closes the connection after the last trial

The simulation clock is paused while the benchmark waits for a command.
A command must arrive within the watchdog (default 1 s) or the trial ends
as an algorithm fault.

## Messages

handshake
    {"type": "handshake", "version": 1, "identity": string,
     "camera": CAMERA,
     "drone": {"d_drone": m, "v_max": m/s, "a_max": m/s^2,
               "velocity_time_constant": s},
     "bounds": [min_x, min_y, max_x, max_y],
     "altitude": m}

handshake_ack
    {"type": "handshake_ack", "version": 1, "identity": string}

trial_start
    {"type": "trial_start", "trial_id": uint64, "start": VEC, "goal": VEC,
     "max_time": s, "trial_seed": uint64}

observation
    {"type": "observation", "t": s,
     "state": {"t": s, "position": VEC, "velocity": VEC,
               "acceleration": VEC, "yaw": rad},
     "goal": VEC, "camera": CAMERA, "depth": DEPTH | null}

command
    {"type": "command", "kind": "velocity" | "waypoint", "vector": VEC,
     "issued_at": s, "processing": s (optional, self-timed)}
    velocity: setpoint in m/s (clamped to v_max by the simulator)
    waypoint: target position in m

trial_end
    {"type": "trial_end", "trial_id": uint64,
     "outcome": "finished" | "collision" | "timeout" | "fault"}

fault
    {"type": "fault", "message": string}

CAMERA
    {"width": px, "height": px, "horizontal_fov": rad, "max_range": m,
     "rate": Hz}

DEPTH
    {"width": px, "height": px, "encoding": "f32le-base64",
     "data": base64 of width*height little-endian IEEE-754 float32 values,
             row-major, row 0 at the top, column 0 at the left}
    Each value is the range along the pixel ray, in (0, max_range];
    max_range means nothing was hit within range.
)";
    return kGrammar;
}

}  // namespace gapbench::wire
