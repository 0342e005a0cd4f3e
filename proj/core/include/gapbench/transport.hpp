#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <sys/types.h>

#include "gapbench/wire.hpp"

namespace gapbench {

/// Bidirectional frame channel to one external algorithm.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(const wire::Message& message) = 0;
    /// Blocks up to timeout_s seconds. Throws AlgorithmFault on timeout or a
    /// closed peer and ProtocolError on malformed frames.
    virtual wire::Message receive(double timeout_s) = 0;
};

/// Frames over a pair of file descriptors (pipes or a connected socket).
class FdTransport : public Transport {
public:
    FdTransport(int read_fd, int write_fd, bool owns_fds = true);
    ~FdTransport() override;
    FdTransport(const FdTransport&) = delete;
    FdTransport& operator=(const FdTransport&) = delete;

    void send(const wire::Message& message) override;
    wire::Message receive(double timeout_s) override;

protected:
    void close_fds();

private:
    int read_fd_;
    int write_fd_;
    bool owns_fds_;
    wire::FrameReader reader_;
};

/// Child process whose stdin/stdout carry frames. Killed and reaped on destruction.
class ChildProcessTransport final : public FdTransport {
public:
    /// Spawns argv[0] (PATH lookup) with extra environment entries "KEY=VALUE".
    static std::unique_ptr<ChildProcessTransport> spawn(const std::vector<std::string>& argv,
                                                        const std::vector<std::string>& extra_env = {});
    ~ChildProcessTransport() override;

private:
    ChildProcessTransport(int read_fd, int write_fd, pid_t pid);
    pid_t pid_;
};

/// Listening unix-domain stream socket; removes its path on destruction.
/// A child process with inherited stdio, terminated on destruction.
class ChildProcess {
public:
    ChildProcess(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env = {});
    ~ChildProcess();
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    [[nodiscard]] pid_t pid() const { return pid_; }

private:
    pid_t pid_;
};

class UnixSocketListener {
public:
    explicit UnixSocketListener(std::string path);
    ~UnixSocketListener();
    UnixSocketListener(const UnixSocketListener&) = delete;
    UnixSocketListener& operator=(const UnixSocketListener&) = delete;

    /// Waits for one connection. Throws AlgorithmFault on timeout.
    std::unique_ptr<Transport> accept(double timeout_s);
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
    int fd_ = -1;
};

/// Client side, used by reference agents: connects to a listening socket.
[[nodiscard]] std::unique_ptr<Transport> connect_unix(const std::string& path);

/// Algorithm that forwards every call over a Transport. The handshake is
/// performed in on_handshake; a version mismatch throws ProtocolError.
/// Connected in-process pair (socketpair), mainly for tests.
[[nodiscard]] std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> transport_pair();

/// Algorithm side of the protocol. Answers the handshake, forwards trials and
/// observations to `algorithm` and returns when the peer closes the stream.
/// Commands carry the self-timed compute duration. An exception from the
/// algorithm is reported with a fault frame and ends the loop (returns false).
bool serve_agent(Transport& transport, Algorithm& algorithm);

class ExternalAlgorithm final : public Algorithm {
public:
    ExternalAlgorithm(std::unique_ptr<Transport> transport, double watchdog_s = 1.0,
                      double handshake_timeout_s = 10.0);

    [[nodiscard]] std::string identity() const override { return identity_; }
    void on_handshake(const Handshake& handshake) override;
    void on_trial_start(const TrialInfo& trial) override;
    Command compute_command(const Observation& observation) override;
    void on_trial_end(Outcome outcome) override;

private:
    std::unique_ptr<Transport> transport_;
    double watchdog_s_;
    double handshake_timeout_s_;
    std::string identity_ = "external";
    std::uint64_t trial_id_ = 0;
    bool handshaken_ = false;
};

}  // namespace gapbench
