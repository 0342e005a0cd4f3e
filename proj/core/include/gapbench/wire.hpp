#pragma once

// Benchmark <-> algorithm wire format.
//
// Frame: 4-byte little-endian unsigned body length, then a UTF-8 JSON body.
// Every body is an object with a "type" field. The full grammar is returned
// by protocol_grammar() and mirrored in docs/protocol.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "gapbench/algorithm.hpp"

namespace gapbench::wire {

inline constexpr std::uint32_t kMaxFrameBytes = 64u << 20;

struct HandshakeAck {
    int version = kProtocolVersion;
    std::string identity;  // algorithm identity

    friend bool operator==(const HandshakeAck&, const HandshakeAck&) = default;
};

struct TrialEnd {
    std::uint64_t trial_id = 0;
    Outcome outcome = Outcome::Timeout;

    friend bool operator==(const TrialEnd&, const TrialEnd&) = default;
};

/// Sent by an algorithm in place of a Command when it cannot produce one.
struct Fault {
    std::string message;

    friend bool operator==(const Fault&, const Fault&) = default;
};

using Message = std::variant<Handshake, HandshakeAck, TrialInfo, Observation, Command, TrialEnd, Fault>;

/// "handshake", "handshake_ack", "trial_start", "observation", "command", "trial_end", "fault".
[[nodiscard]] std::string_view type_name(const Message& message);

/// JSON body. Throws ProtocolError for non-finite numbers.
[[nodiscard]] std::string encode_body(const Message& message);
/// Throws ProtocolError on malformed bodies.
[[nodiscard]] Message decode_body(std::string_view body);

/// Length prefix + body.
[[nodiscard]] std::string encode_frame(const Message& message);
/// Decodes a buffer holding exactly one frame. Throws ProtocolError when the
/// length prefix disagrees with the buffer size.
[[nodiscard]] Message decode_frame(std::string_view frame);

/// Incremental frame splitter for byte streams.
class FrameReader {
public:
    void feed(std::string_view bytes) { buffer_.append(bytes); }
    /// Next complete message, or nullopt if more bytes are needed.
    std::optional<Message> next();
    [[nodiscard]] std::size_t buffered() const { return buffer_.size(); }

private:
    std::string buffer_;
};

[[nodiscard]] std::string_view protocol_grammar();

}  // namespace gapbench::wire
