// bench: campaign runner.
//   bench run <config.json>      run (or resume) a campaign, then write metrics and report
//   bench report <results-dir>   regenerate tables and plots
//   bench metrics <results-dir>  recompute metrics.csv and summary.json from trajectories
//   bench protocol-docs          print the wire protocol grammar
//   bench config-template        print a complete default config
// Exit codes: 0 ok, 1 error, 2 config error, 3 too many algorithm faults.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gapbench/campaign.hpp"
#include "gapbench/errors.hpp"
#include "gapbench/report.hpp"
#include "gapbench/wire.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFaults = 3;

int run(const std::string& config_path, const std::string& output, int workers, bool quiet) {
    gapbench::CampaignConfig config = gapbench::load_config(config_path);
    if (const char* env = std::getenv("BENCH_OUT"); env && *env) config.output_dir = env;
    if (!output.empty()) config.output_dir = output;
    if (workers > 0) config.workers = workers;
    config.validate();

    gapbench::CampaignOptions options;
    if (!quiet) options.progress = [](std::string_view line) { std::cerr << line << '\n'; };
    const gapbench::CampaignResult result = gapbench::run_campaign(config, options);
    for (const auto& path : gapbench::emit_report(result.output_dir)) {
        if (!quiet) std::cerr << "wrote " << path.string() << '\n';
    }
    fmt::print("{} trials ({} run, {} resumed), {} faults, results in {}\n", result.trials_total, result.trials_run,
               result.trials_skipped, result.faults, result.output_dir.string());
    if (result.fault_fraction() > config.max_fault_fraction) {
        fmt::print(stderr, "error: fault fraction {:.3f} exceeds max_fault_fraction {:.3f}\n", result.fault_fraction(),
                   config.max_fault_fraction);
        return kExitFaults;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Obstacle-avoidance benchmark campaign runner"};
    app.require_subcommand(1);

    std::string config_path, output;
    int workers = 0;
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "Run or resume a campaign");
    run_cmd->add_option("config", config_path, "Campaign config (JSON)")->required();
    run_cmd->add_option("-o,--output", output, "Output directory (overrides BENCH_OUT and the config)");
    run_cmd->add_option("-j,--workers", workers, "Worker threads (overrides the config)");
    run_cmd->add_flag("-q,--quiet", quiet, "No progress output");

    std::string results_dir;
    auto* report_cmd = app.add_subcommand("report", "Write report tables and plots");
    report_cmd->add_option("results", results_dir, "Results directory")->required();
    auto* metrics_cmd = app.add_subcommand("metrics", "Recompute metrics from persisted trajectories");
    metrics_cmd->add_option("results", results_dir, "Results directory")->required();
    auto* docs_cmd = app.add_subcommand("protocol-docs", "Print the wire protocol grammar");
    auto* template_cmd = app.add_subcommand("config-template", "Print a complete default config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return run(config_path, output, workers, quiet);
        if (*report_cmd) {
            for (const auto& path : gapbench::emit_report(results_dir)) fmt::print("{}\n", path.string());
            return 0;
        }
        if (*metrics_cmd) {
            (void)gapbench::recompute_metrics(results_dir);
            fmt::print("{}\n", (std::filesystem::path(results_dir) / "summary.json").string());
            return 0;
        }
        if (*docs_cmd) {
            std::cout << gapbench::wire::protocol_grammar();
            return 0;
        }
        if (*template_cmd) {
            std::cout << gapbench::to_json(gapbench::CampaignConfig{}).dump(2) << '\n';
            return 0;
        }
    } catch (const gapbench::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitError;
    }
    return kExitError;
}
