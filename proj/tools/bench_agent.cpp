// Reference external agent: serves a built-in baseline over the wire protocol,
// either on stdin/stdout (default) or by connecting to a unix socket.
//   bench_agent --algorithm reactive
//   bench_agent --algorithm straight-line --connect unix:/tmp/bench.sock

#include <unistd.h>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gapbench/baselines.hpp"
#include "gapbench/transport.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Reference agent for the benchmark wire protocol"};
    std::string algorithm = "straight-line";
    std::string connect;
    std::vector<std::string> names;
    for (auto n : gapbench::builtin_algorithm_names()) names.emplace_back(n);
    app.add_option("-a,--algorithm", algorithm, "Built-in algorithm to serve")->check(CLI::IsMember(names));
    app.add_option("-c,--connect", connect, "Endpoint, unix:PATH (default: stdio)");
    CLI11_PARSE(app, argc, argv);

    try {
        std::unique_ptr<gapbench::Transport> transport;
        if (connect.empty()) {
            transport = std::make_unique<gapbench::FdTransport>(STDIN_FILENO, STDOUT_FILENO, false);
        } else if (connect.rfind("unix:", 0) == 0) {
            transport = gapbench::connect_unix(connect.substr(5));
        } else {
            fmt::print(stderr, "error: unsupported endpoint '{}'\n", connect);
            return 2;
        }
        auto agent = gapbench::builtin_algorithm(algorithm)();
        return gapbench::serve_agent(*transport, *agent) ? 0 : 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
