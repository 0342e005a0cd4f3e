#include "gapbench/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "gapbench/baselines.hpp"
#include "gapbench/errors.hpp"
#include "gapbench/log.hpp"
#include "gapbench/path_oracle.hpp"
#include "gapbench/rng.hpp"
#include "gapbench/serialization.hpp"
#include "gapbench/transport.hpp"

namespace gapbench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace store {

fs::path config_path(const fs::path& dir) { return dir / "config.json"; }

fs::path map_path(const fs::path& dir, int map) { return dir / "maps" / fmt::format("map_{:03}.json", map); }

fs::path trajectory_path(const fs::path& dir, std::string_view algorithm, int map, int trial) {
    return dir / "trials" / std::string(algorithm) / fmt::format("map_{:03}_trial_{:03}.csv", map, trial);
}

fs::path trial_meta_path(const fs::path& dir, std::string_view algorithm, int map, int trial) {
    return dir / "trials" / std::string(algorithm) / fmt::format("map_{:03}_trial_{:03}.json", map, trial);
}

}  // namespace store

namespace {

constexpr int kMaxReplacements = 100;

// Config fields that cannot change results; excluded from the fingerprint.
json result_defining(const CampaignConfig& config) {
    json j = to_json(config);
    j.erase("workers");
    j.erase("output_dir");
    j.erase("max_fault_fraction");
    return j;
}

std::string config_hash(const CampaignConfig& config) { return hex64(fnv1a64(result_defining(config).dump())); }

SimConfig sim_config(const CampaignConfig& c) {
    SimConfig s;
    s.dt = c.dt;
    s.camera = c.camera;
    s.drone = c.drone;
    s.goal_tolerance = c.goal_tolerance;
    s.watchdog = c.watchdog;
    return s;
}

Handshake handshake_for(const CampaignConfig& c) {
    Handshake h;
    h.identity = "gapbench";
    h.camera = c.camera;
    h.drone = c.drone;
    h.bounds = c.map_template.bounds;
    h.altitude = c.altitude;
    return h;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first exception.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
                return;
            }
        }
    };
    const auto count = static_cast<std::size_t>(std::max(1, workers));
    if (count == 1 || n <= 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(count, n); ++w) pool.emplace_back(body);
    }
    if (error) std::rethrow_exception(error);
}

std::vector<std::string> substitute(const std::vector<std::string>& argv, const std::string& endpoint) {
    std::vector<std::string> out;
    for (std::string a : argv) {
        for (auto pos = a.find("{endpoint}"); pos != std::string::npos; pos = a.find("{endpoint}", pos + endpoint.size()))
            a.replace(pos, 10, endpoint);
        out.push_back(std::move(a));
    }
    return out;
}

// One worker's connection to an external algorithm.
struct ExternalSession {
    std::unique_ptr<ChildProcess> process;
    std::unique_ptr<Algorithm> algorithm;
};

class AlgorithmPool {
public:
    AlgorithmPool(const CampaignConfig& config, const AlgorithmSpec& spec) : config_(config), spec_(spec) {
        if (spec.external() && spec.transport == "unix") listener_ = std::make_unique<UnixSocketListener>(spec.endpoint);
        if (!spec.external()) factory_ = builtin_algorithm(spec.builtin);
    }

    [[nodiscard]] const AlgorithmSpec& spec() const { return spec_; }

    std::unique_ptr<ExternalSession> connect() const {
        auto session = std::make_unique<ExternalSession>();
        std::unique_ptr<Transport> transport;
        if (spec_.transport == "stdio") {
            transport = ChildProcessTransport::spawn(spec_.command);
        } else {
            std::lock_guard lock(accept_mutex_);
            if (!spec_.command.empty())
                session->process = std::make_unique<ChildProcess>(substitute(spec_.command, spec_.endpoint));
            transport = listener_->accept(config_.handshake_timeout);
        }
        session->algorithm =
            std::make_unique<ExternalAlgorithm>(std::move(transport), config_.watchdog, config_.handshake_timeout);
        session->algorithm->on_handshake(handshake_for(config_));
        return session;
    }

    std::unique_ptr<Algorithm> builtin() const {
        auto algorithm = factory_();
        algorithm->on_handshake(handshake_for(config_));
        return algorithm;
    }

private:
    const CampaignConfig& config_;
    AlgorithmSpec spec_;
    AlgorithmFactory factory_;
    std::unique_ptr<UnixSocketListener> listener_;
    mutable std::mutex accept_mutex_;
};

json meta_json(const AlgorithmSpec& spec, const std::string& identity, const MapRecord& map, const PlannedTrial& planned,
               const TrialRecord& record) {
    json commands = json::array();
    for (const auto& c : record.commands) {
        commands.push_back(json::array({c.t_issued, c.processing, c.self_reported ? json(*c.self_reported) : json()}));
    }
    return {
        {"algorithm", spec.name},
        {"identity", identity},
        {"map", map.index},
        {"trial", planned.index},
        {"trial_id", planned.trial_id},
        {"spec", to_json(planned.spec)},
        {"outcome", std::string(to_string(record.outcome))},
        {"t_trial", record.t_trial},
        {"fault", record.fault},
        {"contact", record.contact ? to_json(*record.contact) : json()},
        {"commands", std::move(commands)},
    };
}

bool trial_done(const fs::path& meta, const fs::path& trajectory, const PlannedTrial& planned) {
    if (!fs::exists(meta) || !fs::exists(trajectory)) return false;
    try {
        const json j = json::parse(read_file(meta));
        return trial_spec_from_json(j.at("spec")) == planned.spec;
    } catch (const std::exception&) {
        return false;
    }
}

TrialRecord fault_record(const PlannedTrial& planned, const std::string& message) {
    TrialRecord record;
    record.trial = planned.spec;
    record.d_min = planned.d_min;
    record.outcome = Outcome::Fault;
    record.fault = message;
    DroneState start;
    start.position = planned.spec.start;
    record.states.push_back(start);
    return record;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_sig9(*v) : std::string("absent"); }

json stats_json(const std::vector<double>& values) {
    const auto ms = mean_std(values);
    if (!ms) return json{{"mean", nullptr}, {"std", nullptr}, {"count", 0}};
    return json{{"mean", ms->mean}, {"std", ms->std}, {"count", ms->count}};
}

struct Tally {
    std::size_t trials = 0, finished = 0, collision = 0, timeout = 0, fault = 0;
    std::vector<double> po, eo, agv, mp, d_min;

    void add(const TrialMetrics& m) {
        ++trials;
        switch (m.outcome) {
            case Outcome::Finished: ++finished; break;
            case Outcome::Collision: ++collision; break;
            case Outcome::Timeout: ++timeout; break;
            case Outcome::Fault: ++fault; break;
        }
        if (m.po) po.push_back(*m.po);
        if (m.eo) eo.push_back(*m.eo);
        if (m.agv) agv.push_back(*m.agv);
        mp.push_back(m.mp);
        if (m.d_min) d_min.push_back(*m.d_min);
    }

    [[nodiscard]] std::size_t denominator(bool exclude_faults) const { return exclude_faults ? trials - fault : trials; }

    [[nodiscard]] std::optional<SuccessSample> sample(bool exclude_faults) const {
        const std::size_t whole = denominator(exclude_faults);
        if (whole == 0 || d_min.empty()) return std::nullopt;
        return SuccessSample{success_rate(finished, whole), mean_std(d_min)->mean, whole};
    }

    [[nodiscard]] json to_json(bool exclude_faults) const {
        const std::size_t whole = denominator(exclude_faults);
        return {
            {"trials", trials},
            {"finished", finished},
            {"collision", collision},
            {"timeout", timeout},
            {"fault", fault},
            {"sr_denominator", whole},
            {"sr", whole ? json(success_rate(finished, whole)) : json()},
            {"mean_d_min", d_min.empty() ? json() : json(mean_std(d_min)->mean)},
            {"po", stats_json(po)},
            {"eo", stats_json(eo)},
            {"agv", stats_json(agv)},
            {"mp", stats_json(mp)},
        };
    }
};

json cf_matrix(const std::vector<std::optional<SuccessSample>>& samples) {
    json rows = json::array();
    for (const auto& a : samples) {
        json row = json::array();
        for (const auto& b : samples) row.push_back(a && b ? json(contrast_factor(*a, *b)) : json());
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json to_json(const MapRecord& r) {
    json trials = json::array();
    for (const auto& t : r.trials) {
        trials.push_back({{"index", t.index},
                          {"trial_id", t.trial_id},
                          {"spec", to_json(t.spec)},
                          {"d_min", t.d_min},
                          {"replacements", t.replacements}});
    }
    return {
        {"index", r.index},
        {"map_seed", r.map_seed},
        {"r_poisson", r.r_poisson},
        {"style", std::string(to_string(r.style))},
        {"map", to_json(r.map)},
        {"env", to_json(r.env)},
        {"trials", std::move(trials)},
    };
}

MapRecord map_record_from_json(const json& j) {
    MapRecord r;
    r.index = j.at("index").get<int>();
    r.map_seed = j.at("map_seed").get<std::uint64_t>();
    r.r_poisson = j.at("r_poisson").get<double>();
    r.style = map_style_from_string(j.at("style").get<std::string>());
    r.map = obstacle_map_from_json(j.at("map"));
    r.env = env_metrics_from_json(j.at("env"));
    for (const auto& t : j.at("trials")) {
        PlannedTrial p;
        p.index = t.at("index").get<int>();
        p.trial_id = t.at("trial_id").get<std::uint64_t>();
        p.spec = trial_spec_from_json(t.at("spec"));
        p.d_min = t.at("d_min").get<double>();
        p.replacements = t.at("replacements").get<int>();
        r.trials.push_back(std::move(p));
    }
    return r;
}

MapRecord plan_map(const CampaignConfig& config, int m) {
    MapRecord r;
    r.index = m;
    r.map_seed = derive_seed(config.master_seed, Stream::Map, static_cast<std::uint64_t>(m));
    Rng radius_rng(derive_seed(r.map_seed, Stream::PoissonRadius));
    r.r_poisson = radius_rng.uniform(config.r_poisson_range.first, config.r_poisson_range.second);

    MapSpec spec = config.map_template;
    spec.r_poisson = r.r_poisson;
    spec.map_seed = r.map_seed;
    spec.d_drone = config.drone.d_drone;
    r.style = spec.style;
    r.map = generate_map(spec);

    const Scene scene(r.map);
    TraversabilityConfig tc;
    tc.grid_spacing = config.effective_traversability_spacing();
    tc.directions = config.traversability_directions;
    tc.altitude = config.altitude;
    tc.d_drone = config.drone.d_drone;
    r.env = compute_env_metrics(scene, tc, r.r_poisson);

    const OccupancyGrid grid =
        rasterize_occupancy(r.map, config.effective_oracle_cell_size(), config.drone.d_drone, config.altitude);
    const TrialConstraints constraints = config.trial_constraints();
    const std::uint64_t base = derive_seed(config.master_seed, Stream::Trial, static_cast<std::uint64_t>(m));
    for (int j = 0; j < config.trials_per_map; ++j) {
        PlannedTrial p;
        p.index = j;
        p.trial_id = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(config.trials_per_map) +
                     static_cast<std::uint64_t>(j);
        const std::uint64_t first = derive_seed(base, Stream::Trial, static_cast<std::uint64_t>(j));
        for (int attempt = 0;; ++attempt) {
            if (attempt > kMaxReplacements)
                throw InfeasibleError(fmt::format("map {}: no reachable trial after {} draws", m, attempt));
            const std::uint64_t seed =
                attempt == 0 ? first : derive_seed(first, Stream::TrialSampling, static_cast<std::uint64_t>(attempt));
            p.spec = generate_trial(r.map, seed, constraints);
            try {
                p.d_min = shortest_free_path(grid, p.spec.start.head<2>(), p.spec.goal.head<2>()).d_min;
                p.replacements = attempt;
                break;
            } catch (const UnreachableError&) {
                log::warn(fmt::format("map {} trial {}: goal unreachable, drawing a replacement", m, j));
            } catch (const DomainError&) {
                log::warn(fmt::format("map {} trial {}: endpoint on an occupied oracle cell, drawing a replacement", m, j));
            }
        }
        r.trials.push_back(std::move(p));
    }
    return r;
}

CampaignResult run_campaign(const CampaignConfig& config, const CampaignOptions& options) {
    config.validate();
    auto progress = [&](const std::string& message) {
        if (options.progress) options.progress(message);
    };

    CampaignResult result;
    result.output_dir = config.output_dir;
    const fs::path dir = result.output_dir;
    fs::create_directories(dir / "maps");

    const fs::path snapshot = store::config_path(dir);
    if (fs::exists(snapshot)) {
        CampaignConfig previous;
        try {
            previous = config_from_json(json::parse(read_file(snapshot)));
        } catch (const std::exception& e) {
            throw ConfigError(fmt::format("{}: unreadable config snapshot: {}", snapshot.string(), e.what()));
        }
        if (result_defining(previous) != result_defining(config))
            throw ConfigError(fmt::format("{} holds results of a different campaign", dir.string()));
    }
    write_file_atomic(snapshot, to_json(config).dump(2) + "\n");

    std::vector<MapRecord> maps(static_cast<std::size_t>(config.maps));
    parallel_for(maps.size(), config.workers, [&](std::size_t m) {
        const fs::path path = store::map_path(dir, static_cast<int>(m));
        if (fs::exists(path)) {
            maps[m] = map_record_from_json(json::parse(read_file(path)));
            if (maps[m].map_seed != derive_seed(config.master_seed, Stream::Map, m) ||
                static_cast<int>(maps[m].trials.size()) != config.trials_per_map)
                throw ConfigError(fmt::format("{} does not match the config", path.string()));
        } else {
            maps[m] = plan_map(config, static_cast<int>(m));
            write_file_atomic(path, to_json(maps[m]).dump(1) + "\n");
        }
        progress(fmt::format("map {}: {} obstacles, TRAV {:.3f}, RGS {:.3f}", m, maps[m].map.cylinders.size(),
                             maps[m].env.trav, maps[m].env.rgs));
    });
    std::vector<Scene> scenes;
    scenes.reserve(maps.size());
    for (const auto& m : maps) scenes.emplace_back(m.map);

    struct Item {
        std::size_t algorithm;
        std::size_t map;
        std::size_t trial;
    };
    std::vector<Item> pending;
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        fs::create_directories(dir / "trials" / config.algorithms[a].name);
        for (std::size_t m = 0; m < maps.size(); ++m) {
            for (std::size_t j = 0; j < maps[m].trials.size(); ++j) {
                ++result.trials_total;
                const auto& name = config.algorithms[a].name;
                if (trial_done(store::trial_meta_path(dir, name, static_cast<int>(m), static_cast<int>(j)),
                               store::trajectory_path(dir, name, static_cast<int>(m), static_cast<int>(j)),
                               maps[m].trials[j]))
                    ++result.trials_skipped;
                else
                    pending.push_back({a, m, j});
            }
        }
    }
    if (options.max_new_trials > 0 && pending.size() > options.max_new_trials) pending.resize(options.max_new_trials);

    std::vector<std::unique_ptr<AlgorithmPool>> pools;
    for (const auto& spec : config.algorithms) pools.push_back(std::make_unique<AlgorithmPool>(config, spec));
    const SimConfig sim = sim_config(config);

    // Work is handed out in order; each worker keeps its own external sessions.
    const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(pending.size())));
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        std::vector<std::unique_ptr<ExternalSession>> sessions(pools.size());
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            const Item item = pending[i];
            const AlgorithmPool& pool = *pools[item.algorithm];
            const MapRecord& map = maps[item.map];
            const PlannedTrial& planned = map.trials[item.trial];
            try {
                TrialRecord record;
                std::string identity = pool.spec().name;
                try {
                    if (pool.spec().external()) {
                        auto& session = sessions[item.algorithm];
                        if (!session) session = pool.connect();
                        identity = session->algorithm->identity();
                        record = run_trial(scenes[item.map], planned.spec, *session->algorithm, sim, planned.trial_id,
                                           planned.d_min);
                        // A faulted session may be out of step; reconnect for the next trial.
                        if (record.outcome == Outcome::Fault) session.reset();
                    } else {
                        auto algorithm = pool.builtin();
                        identity = algorithm->identity();
                        record = run_trial(scenes[item.map], planned.spec, *algorithm, sim, planned.trial_id, planned.d_min);
                    }
                } catch (const std::exception& e) {
                    sessions[item.algorithm].reset();
                    record = fault_record(planned, e.what());
                }
                const auto& name = pool.spec().name;
                const int m = static_cast<int>(item.map);
                const int j = static_cast<int>(item.trial);
                write_file_atomic(store::trajectory_path(dir, name, m, j), trajectory_csv(record.states));
                write_file_atomic(store::trial_meta_path(dir, name, m, j),
                                  meta_json(pool.spec(), identity, map, planned, record).dump() + "\n");
                const std::size_t finished = ++done;
                progress(fmt::format("[{}/{}] {} map {} trial {}: {}{}", finished, pending.size(), name, m, j,
                                     to_string(record.outcome), record.fault.empty() ? "" : " (" + record.fault + ")"));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = pending.size();
                return;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    result.trials_run = done;
    result.complete = result.trials_run + result.trials_skipped == result.trials_total;
    if (!result.complete) return result;

    const json summary = recompute_metrics(dir);
    for (const auto& a : summary.at("algorithms")) result.faults += a.at("fault").get<std::size_t>();
    return result;
}

CampaignData load_campaign(const fs::path& dir) {
    CampaignData data;
    data.dir = dir;
    const fs::path snapshot = store::config_path(dir);
    if (!fs::exists(snapshot)) throw std::runtime_error(fmt::format("{}: not a results directory", dir.string()));
    data.config = config_from_json(json::parse(read_file(snapshot)));
    data.config_hash = config_hash(data.config);
    const auto& c = data.config;
    for (int m = 0; m < c.maps; ++m) {
        const fs::path path = store::map_path(dir, m);
        if (!fs::exists(path)) throw std::runtime_error(fmt::format("incomplete campaign: {} missing", path.string()));
        data.maps.push_back(map_record_from_json(json::parse(read_file(path))));
    }
    for (const auto& spec : c.algorithms) {
        std::vector<TrialResult> results;
        std::string trial_list;
        for (const auto& map : data.maps) {
            for (const auto& planned : map.trials) {
                const fs::path meta_path = store::trial_meta_path(dir, spec.name, map.index, planned.index);
                const fs::path traj_path = store::trajectory_path(dir, spec.name, map.index, planned.index);
                if (!fs::exists(meta_path) || !fs::exists(traj_path))
                    throw std::runtime_error(fmt::format("incomplete campaign: {} missing", meta_path.string()));
                const json meta = json::parse(read_file(meta_path));
                TrialRecord record;
                record.trial = trial_spec_from_json(meta.at("spec"));
                record.outcome = outcome_from_string(meta.at("outcome").get<std::string>());
                record.t_trial = meta.at("t_trial").get<double>();
                record.states = parse_trajectory_csv(read_file(traj_path));
                record.d_trav = travelled_distance(record.states);
                record.d_min = planned.d_min;
                trial_list += to_json(record.trial).dump();

                TrialResult r;
                r.map = map.index;
                r.trial = planned.index;
                r.identity = meta.at("identity").get<std::string>();
                r.fault = meta.at("fault").get<std::string>();
                r.metrics = compute_trial_metrics(record);
                for (const auto& cmd : meta.at("commands")) {
                    r.processing.push_back(cmd.at(1).get<double>());
                    r.self_reported.push_back(cmd.at(2).is_null() ? std::nullopt
                                                                  : std::optional<double>(cmd.at(2).get<double>()));
                }
                results.push_back(std::move(r));
            }
        }
        data.trial_list_hashes.push_back(hex64(fnv1a64(trial_list)));
        data.results.push_back(std::move(results));
    }
    return data;
}

json summarize(const CampaignData& data) {
    const auto& c = data.config;
    const bool exclude = c.exclude_faults;

    json maps = json::array();
    std::vector<double> trav;
    for (const auto& m : data.maps) {
        int replacements = 0;
        for (const auto& t : m.trials) replacements += t.replacements;
        maps.push_back({{"index", m.index},
                        {"map_seed", m.map_seed},
                        {"r_poisson", m.r_poisson},
                        {"style", std::string(to_string(m.style))},
                        {"obstacles", m.map.cylinders.size()},
                        {"env", to_json(m.env)},
                        {"replacements", replacements}});
        trav.push_back(m.env.trav);
    }

    json algorithms = json::array();
    std::vector<std::optional<SuccessSample>> overall;
    for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
        Tally tally;
        for (const auto& r : data.results[a]) tally.add(r.metrics);
        json entry = tally.to_json(exclude);
        entry["name"] = c.algorithms[a].name;
        entry["identity"] = data.results[a].empty() ? c.algorithms[a].name : data.results[a].front().identity;
        entry["trial_list_hash"] = data.trial_list_hashes[a];
        algorithms.push_back(std::move(entry));
        overall.push_back(tally.sample(exclude));
    }

    const Binning binning = bin_by_traversability(trav, c.bins);
    json bins = json::array();
    std::vector<double> bin_centers;
    std::vector<std::vector<double>> bin_sr(c.algorithms.size());
    json per_bin_cf = json::array();
    for (std::size_t b = 0; b < binning.bins.size(); ++b) {
        const auto& bin = binning.bins[b];
        json per_algorithm = json::object();
        std::vector<std::optional<SuccessSample>> samples;
        for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
            Tally tally;
            for (std::size_t m : bin.members) {
                for (int j = 0; j < c.trials_per_map; ++j)
                    tally.add(data.results[a][m * static_cast<std::size_t>(c.trials_per_map) + static_cast<std::size_t>(j)].metrics);
            }
            per_algorithm[c.algorithms[a].name] = tally.to_json(exclude);
            samples.push_back(tally.sample(exclude));
            if (samples.back()) bin_sr[a].push_back(samples.back()->sr);
        }
        bin_centers.push_back(bin.center());
        json members = json::array();
        for (std::size_t m : bin.members) members.push_back(m);
        bins.push_back({{"index", b}, {"lo", bin.lo}, {"hi", bin.hi}, {"maps", std::move(members)}, {"algorithms", std::move(per_algorithm)}});
        per_bin_cf.push_back(cf_matrix(samples));
    }

    json trend = json::object();
    for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
        std::optional<double> rho;
        if (bin_sr[a].size() == bin_centers.size()) rho = spearman(bin_centers, bin_sr[a]);
        trend[c.algorithms[a].name] = rho ? json(*rho) : json();
    }

    json names = json::array();
    for (const auto& a : c.algorithms) names.push_back(a.name);
    json warnings = json::array();
    for (const auto& w : binning.warnings) warnings.push_back(w);

    return {
        {"format", "gapbench-summary/1"},
        {"config_hash", data.config_hash},
        {"master_seed", c.master_seed},
        {"maps_count", c.maps},
        {"trials_per_map", c.trials_per_map},
        {"conventions",
         {{"std", "population"},
          {"percentile", "nearest-rank"},
          {"po_eo_agv", "finished trials only"},
          {"mp", "clamped to [0, 100]"},
          {"cf_success_rate", "clamped to [1/(2T), 1 - 1/(2T)]"},
          {"sr_denominator", exclude ? "all trials except faults" : "all trials"},
          {"bins", "equal width over TRAV, maximum in the last bin"},
          {"trav_sampling", "grid points inside inflated obstacles skipped"},
          {"processing_time", "wall clock, machine-specific; kept in processing.csv, not in this summary"},
          {"d_min", {{"search", "A*, 8-connected, octile costs, no corner cutting, no smoothing"},
                     {"cell_size", c.effective_oracle_cell_size()},
                     {"inflation", 0.5 * c.drone.d_drone}}}}},
        {"maps", std::move(maps)},
        {"algorithms", std::move(algorithms)},
        {"bins", {{"requested", c.bins}, {"warnings", std::move(warnings)}, {"bins", std::move(bins)}}},
        {"trend_spearman", std::move(trend)},
        {"contrast_factor", {{"algorithms", names}, {"matrix", cf_matrix(overall)}, {"per_bin", std::move(per_bin_cf)}}},
    };
}

json recompute_metrics(const fs::path& dir) {
    const CampaignData data = load_campaign(dir);
    const auto& c = data.config;

    std::string metrics = "algorithm,map,trial,trav,outcome,d_min,d_trav,t_trial,po,eo,agv,mp\n";
    std::string processing = "algorithm,map,trial,commands,mean,std,max,p95,self_reported_mean\n";
    for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
        for (const auto& r : data.results[a]) {
            const auto& m = r.metrics;
            metrics += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", c.algorithms[a].name, r.map, r.trial,
                                   format_sig9(data.maps[static_cast<std::size_t>(r.map)].env.trav), to_string(m.outcome),
                                   fmt_opt(m.d_min), format_sig9(m.d_trav), format_sig9(m.t_trial), fmt_opt(m.po),
                                   fmt_opt(m.eo), fmt_opt(m.agv), format_sig9(m.mp));
            std::vector<double> self;
            for (const auto& s : r.self_reported)
                if (s) self.push_back(*s);
            const auto self_stats = mean_std(self);
            if (r.processing.empty()) {
                processing += fmt::format("{},{},{},0,absent,absent,absent,absent,absent\n", c.algorithms[a].name, r.map, r.trial);
            } else {
                const ProcessingStats s = processing_stats(r.processing);
                processing += fmt::format("{},{},{},{},{},{},{},{},{}\n", c.algorithms[a].name, r.map, r.trial,
                                          r.processing.size(), format_sig9(s.mean), format_sig9(s.std), format_sig9(s.max),
                                          format_sig9(s.p95), self_stats ? format_sig9(self_stats->mean) : "absent");
            }
        }
    }
    json summary = summarize(data);
    write_file_atomic(dir / "metrics.csv", metrics);
    write_file_atomic(dir / "processing.csv", processing);
    write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

}  // namespace gapbench
