#include "gapbench/transport.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "gapbench/errors.hpp"

extern char** environ;

namespace gapbench {
namespace {

void ignore_sigpipe() {
    static const bool once = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)once;
}

std::string errno_text(const char* what) { return fmt::format("{}: {}", what, std::strerror(errno)); }

int poll_ms(double seconds) {
    return seconds <= 0.0 ? 0 : static_cast<int>(std::min(seconds * 1000.0, 2.0e9)) + 1;
}

}  // namespace

FdTransport::FdTransport(int read_fd, int write_fd, bool owns_fds)
    : read_fd_(read_fd), write_fd_(write_fd), owns_fds_(owns_fds) {
    ignore_sigpipe();
}

FdTransport::~FdTransport() { close_fds(); }

void FdTransport::close_fds() {
    if (owns_fds_) {
        if (write_fd_ >= 0) ::close(write_fd_);
        if (read_fd_ >= 0 && read_fd_ != write_fd_) ::close(read_fd_);
    }
    read_fd_ = write_fd_ = -1;
}

void FdTransport::send(const wire::Message& message) {
    const std::string frame = wire::encode_frame(message);
    std::size_t sent = 0;
    while (sent < frame.size()) {
        const ssize_t n = ::write(write_fd_, frame.data() + sent, frame.size() - sent);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw AlgorithmFault(errno_text("algorithm fault: write to algorithm failed"));
        }
        sent += static_cast<std::size_t>(n);
    }
}

wire::Message FdTransport::receive(double timeout_s) {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration<double>(timeout_s);
    char chunk[1 << 16];
    while (true) {
        if (auto m = reader_.next()) return std::move(*m);
        const double left = std::chrono::duration<double>(deadline - Clock::now()).count();
        if (left <= 0.0) throw AlgorithmFault(fmt::format("algorithm fault: no reply within {:.3f} s", timeout_s));
        pollfd pfd{read_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, poll_ms(left));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw AlgorithmFault(errno_text("algorithm fault: poll failed"));
        }
        if (ready == 0) continue;
        const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw AlgorithmFault(errno_text("algorithm fault: read from algorithm failed"));
        }
        if (n == 0) throw AlgorithmFault("algorithm fault: algorithm closed the connection");
        reader_.feed(std::string_view(chunk, static_cast<std::size_t>(n)));
    }
}

ChildProcessTransport::ChildProcessTransport(int read_fd, int write_fd, pid_t pid)
    : FdTransport(read_fd, write_fd), pid_(pid) {}

namespace {

pid_t spawn_with(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env,
                 const posix_spawn_file_actions_t* actions) {
    if (argv.empty()) throw std::invalid_argument("empty algorithm command");
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    std::vector<std::string> env_storage;
    for (char** e = environ; *e; ++e) env_storage.emplace_back(*e);
    for (const auto& e : extra_env) env_storage.push_back(e);
    std::vector<char*> env;
    for (auto& e : env_storage) env.push_back(e.data());
    env.push_back(nullptr);

    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, args[0], actions, nullptr, args.data(), env.data());
    if (rc != 0) throw AlgorithmFault(fmt::format("algorithm fault: cannot start '{}': {}", argv[0], std::strerror(rc)));
    return pid;
}

void reap(pid_t pid) {
    int status = 0;
    for (int i = 0; i < 250; ++i) {
        if (::waitpid(pid, &status, WNOHANG) == pid) return;
        ::usleep(2000);
    }
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
}

}  // namespace

std::unique_ptr<ChildProcessTransport> ChildProcessTransport::spawn(const std::vector<std::string>& argv,
                                                                    const std::vector<std::string>& extra_env) {
    if (argv.empty()) throw std::invalid_argument("empty algorithm command");
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw std::runtime_error(errno_text("pipe"));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw std::runtime_error(errno_text("pipe"));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    pid_t pid = 0;
    try {
        pid = spawn_with(argv, extra_env, &actions);
    } catch (...) {
        posix_spawn_file_actions_destroy(&actions);
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
        throw;
    }
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::unique_ptr<ChildProcessTransport>(new ChildProcessTransport(from_child[0], to_child[1], pid));
}

ChildProcessTransport::~ChildProcessTransport() {
    if (pid_ <= 0) return;
    // Closing stdin is the end-of-session signal; give the child a moment to exit.
    close_fds();
    reap(pid_);
}

ChildProcess::ChildProcess(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env)
    : pid_(spawn_with(argv, extra_env, nullptr)) {}

ChildProcess::~ChildProcess() {
    if (pid_ <= 0) return;
    ::kill(pid_, SIGTERM);
    reap(pid_);
}

UnixSocketListener::UnixSocketListener(std::string path) : path_(std::move(path)) {
    ignore_sigpipe();
    sockaddr_un addr{};
    if (path_.size() >= sizeof addr.sun_path) throw std::invalid_argument("unix socket path too long");
    fd_ = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) throw std::runtime_error(errno_text("socket"));
    addr.sun_family = AF_UNIX;
    std::memcpy(addr.sun_path, path_.c_str(), path_.size() + 1);
    ::unlink(path_.c_str());
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 8) != 0) {
        const std::string msg = errno_text("bind/listen");
        ::close(fd_);
        throw std::runtime_error(msg);
    }
}

UnixSocketListener::~UnixSocketListener() {
    if (fd_ >= 0) ::close(fd_);
    ::unlink(path_.c_str());
}

std::unique_ptr<Transport> UnixSocketListener::accept(double timeout_s) {
    pollfd pfd{fd_, POLLIN, 0};
    int ready = 0;
    do {
        ready = ::poll(&pfd, 1, poll_ms(timeout_s));
    } while (ready < 0 && errno == EINTR);
    if (ready <= 0) throw AlgorithmFault(fmt::format("algorithm fault: no connection on {} within {:.1f} s", path_, timeout_s));
    const int conn = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (conn < 0) throw AlgorithmFault(errno_text("algorithm fault: accept failed"));
    return std::make_unique<FdTransport>(conn, conn);
}

std::unique_ptr<Transport> connect_unix(const std::string& path) {
    ignore_sigpipe();
    sockaddr_un addr{};
    if (path.size() >= sizeof addr.sun_path) throw std::invalid_argument("unix socket path too long");
    const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) throw std::runtime_error(errno_text("socket"));
    addr.sun_family = AF_UNIX;
    std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string msg = errno_text("connect");
        ::close(fd);
        throw std::runtime_error(msg);
    }
    return std::make_unique<FdTransport>(fd, fd);
}

ExternalAlgorithm::ExternalAlgorithm(std::unique_ptr<Transport> transport, double watchdog_s,
                                     double handshake_timeout_s)
    : transport_(std::move(transport)), watchdog_s_(watchdog_s), handshake_timeout_s_(handshake_timeout_s) {}

void ExternalAlgorithm::on_handshake(const Handshake& handshake) {
    transport_->send(handshake);
    const wire::Message reply = transport_->receive(handshake_timeout_s_);
    if (const auto* f = std::get_if<wire::Fault>(&reply)) throw AlgorithmFault("algorithm fault: " + f->message);
    const auto* ack = std::get_if<wire::HandshakeAck>(&reply);
    if (!ack) throw ProtocolError(fmt::format("expected handshake_ack, got {}", wire::type_name(reply)));
    if (ack->version != kProtocolVersion)
        throw ProtocolError(fmt::format("protocol version mismatch: benchmark {}, algorithm {}", kProtocolVersion, ack->version));
    identity_ = ack->identity;
    handshaken_ = true;
}

void ExternalAlgorithm::on_trial_start(const TrialInfo& trial) {
    if (!handshaken_) throw ProtocolError("trial started before handshake");
    trial_id_ = trial.trial_id;
    transport_->send(trial);
}

Command ExternalAlgorithm::compute_command(const Observation& observation) {
    transport_->send(observation);
    const wire::Message reply = transport_->receive(watchdog_s_);
    if (const auto* f = std::get_if<wire::Fault>(&reply)) throw AlgorithmFault("algorithm fault: " + f->message);
    const auto* cmd = std::get_if<Command>(&reply);
    if (!cmd) throw ProtocolError(fmt::format("expected command, got {}", wire::type_name(reply)));
    return *cmd;
}

void ExternalAlgorithm::on_trial_end(Outcome outcome) { transport_->send(wire::TrialEnd{trial_id_, outcome}); }

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> transport_pair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) throw std::runtime_error(errno_text("socketpair"));
    return {std::make_unique<FdTransport>(fds[0], fds[0]), std::make_unique<FdTransport>(fds[1], fds[1])};
}

bool serve_agent(Transport& transport, Algorithm& algorithm) {
    using Clock = std::chrono::steady_clock;
    constexpr double kForever = 1.0e9;
    while (true) {
        wire::Message message;
        try {
            message = transport.receive(kForever);
        } catch (const AlgorithmFault&) {
            return true;  // peer closed the stream
        }
        try {
            if (const auto* hs = std::get_if<Handshake>(&message)) {
                if (hs->version != kProtocolVersion) {
                    transport.send(wire::Fault{fmt::format("protocol version mismatch: benchmark {}, algorithm {}",
                                                           hs->version, kProtocolVersion)});
                    return false;
                }
                algorithm.on_handshake(*hs);
                transport.send(wire::HandshakeAck{kProtocolVersion, algorithm.identity()});
            } else if (const auto* trial = std::get_if<TrialInfo>(&message)) {
                algorithm.on_trial_start(*trial);
            } else if (const auto* obs = std::get_if<Observation>(&message)) {
                const auto t0 = Clock::now();
                Command command = algorithm.compute_command(*obs);
                if (!command.finite()) throw AlgorithmFault("non-finite command");
                command.self_reported_processing = std::chrono::duration<double>(Clock::now() - t0).count();
                transport.send(command);
            } else if (const auto* end = std::get_if<wire::TrialEnd>(&message)) {
                algorithm.on_trial_end(end->outcome);
            } else {
                throw ProtocolError(fmt::format("unexpected {} message", wire::type_name(message)));
            }
        } catch (const std::exception& e) {
            try {
                transport.send(wire::Fault{e.what()});
            } catch (const std::exception&) {
            }
            return false;
        }
    }
}

}  // namespace gapbench
