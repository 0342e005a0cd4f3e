#include <chrono>
#include <filesystem>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>

#include "gapbench/baselines.hpp"
#include "gapbench/errors.hpp"
#include "gapbench/sim.hpp"
#include "gapbench/transport.hpp"
#include "test_support.hpp"

using namespace gapbench;
using testkit::cyl;

namespace {

const Bounds kBox{-30, -30, 30, 30};

Handshake handshake(const SimConfig& cfg) {
    Handshake h;
    h.identity = "test-bench";
    h.camera = cfg.camera;
    h.drone = cfg.drone;
    h.bounds = kBox;
    return h;
}

Scene test_scene() {
    return Scene(testkit::make_map(kBox, {cyl(0, 0.4, 1.0), cyl(6, -2, 0.7), cyl(-8, 3, 1.2), cyl(10, 8, 0.9)}));
}

std::vector<TrialSpec> trials() {
    return {TrialSpec{Vec3(-20, 0, 1.5), Vec3(20, 0, 1.5), 40, 0}, TrialSpec{Vec3(-20, 5, 1.5), Vec3(20, -4, 1.5), 40, 1},
            TrialSpec{Vec3(0, -20, 1.5), Vec3(0, 20, 1.5), 40, 2}, TrialSpec{Vec3(15, 15, 1.5), Vec3(-15, -10, 1.5), 40, 3},
            TrialSpec{Vec3(-20, -20, 1.5), Vec3(20, 20, 1.5), 40, 4}};
}

void expect_equivalent(const TrialRecord& a, const TrialRecord& b) {
    ASSERT_EQ(a.outcome, b.outcome);
    ASSERT_EQ(a.states.size(), b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        EXPECT_LE((a.states[k].position - b.states[k].position).norm(), 1e-6);
        EXPECT_LE((a.states[k].velocity - b.states[k].velocity).norm(), 1e-6);
    }
    EXPECT_NEAR(a.t_trial, b.t_trial, 1e-6);
    EXPECT_NEAR(a.d_trav, b.d_trav, 1e-6);
}

void check_against_in_process(ExternalAlgorithm& external, const std::string& builtin) {
    const Scene scene = test_scene();
    const SimConfig cfg;
    external.on_handshake(handshake(cfg));
    std::uint64_t id = 0;
    for (const TrialSpec& t : trials()) {
        auto local = builtin_algorithm(builtin)();
        local->on_handshake(handshake(cfg));
        const TrialRecord expected = run_trial(scene, t, *local, cfg, id);
        const TrialRecord got = run_trial(scene, t, external, cfg, id);
        expect_equivalent(expected, got);
        ++id;
    }
}

class Exploding final : public Algorithm {
public:
    [[nodiscard]] std::string identity() const override { return "exploding"; }
    Command compute_command(const Observation&) override { throw std::runtime_error("kaboom"); }
};

class NonFinite final : public Algorithm {
public:
    [[nodiscard]] std::string identity() const override { return "nan"; }
    Command compute_command(const Observation&) override {
        Command c;
        c.vector = Vec3(std::nan(""), 0, 0);
        return c;
    }
};

}  // namespace

TEST(Transport, PairCarriesFrames) {
    auto [a, b] = transport_pair();
    a->send(wire::Fault{"hello"});
    EXPECT_EQ(b->receive(1.0), wire::Message(wire::Fault{"hello"}));
    b->send(wire::TrialEnd{3, Outcome::Finished});
    EXPECT_EQ(a->receive(1.0), wire::Message(wire::TrialEnd{3, Outcome::Finished}));
}

TEST(Transport, ReceiveTimesOut) {
    auto [a, b] = transport_pair();
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_THROW((void)a->receive(0.05), AlgorithmFault);
    EXPECT_GE(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0.04);
}

TEST(Transport, ClosedPeerIsFault) {
    auto [a, b] = transport_pair();
    b.reset();
    EXPECT_THROW((void)a->receive(1.0), AlgorithmFault);
}

TEST(ServeAgent, MatchesInProcessReactive) {
    auto [bench_side, agent_side] = transport_pair();
    ReactiveDodger agent_algo;
    bool served = false;
    std::thread agent([&, t = std::move(agent_side)] { served = serve_agent(*t, agent_algo); });
    {
        ExternalAlgorithm external(std::move(bench_side));
        check_against_in_process(external, "reactive");
        EXPECT_EQ(external.identity(), "reactive");
    }
    agent.join();
    EXPECT_TRUE(served);
}

TEST(ServeAgent, SelfReportedWithinRoundTrip) {
    auto [bench_side, agent_side] = transport_pair();
    StraightLineBaseline algo;
    std::thread agent([&, t = std::move(agent_side)] { (void)serve_agent(*t, algo); });
    {
        ExternalAlgorithm external(std::move(bench_side));
        const SimConfig cfg;
        external.on_handshake(handshake(cfg));
        const TrialRecord rec = run_trial(test_scene(), trials()[0], external, cfg);
        ASSERT_FALSE(rec.commands.empty());
        for (const CommandTiming& c : rec.commands) {
            ASSERT_TRUE(c.self_reported);
            EXPECT_GE(*c.self_reported, 0.0);
            EXPECT_LE(*c.self_reported, c.processing);
        }
    }
    agent.join();
}

TEST(ServeAgent, VersionMismatch) {
    auto [bench_side, agent_side] = transport_pair();
    StraightLineBaseline algo;
    bool served = true;
    std::thread agent([&, t = std::move(agent_side)] { served = serve_agent(*t, algo); });
    Handshake h = handshake(SimConfig{});
    h.version = kProtocolVersion + 1;
    bench_side->send(h);
    const wire::Message reply = bench_side->receive(2.0);
    agent.join();
    EXPECT_FALSE(served);
    ASSERT_TRUE(std::holds_alternative<wire::Fault>(reply));
    EXPECT_NE(std::get<wire::Fault>(reply).message.find("version"), std::string::npos);
}

TEST(ServeAgent, AlgorithmExceptionBecomesFaultOutcome) {
    auto [bench_side, agent_side] = transport_pair();
    Exploding algo;
    std::thread agent([&, t = std::move(agent_side)] { (void)serve_agent(*t, algo); });
    {
        ExternalAlgorithm external(std::move(bench_side));
        const SimConfig cfg;
        external.on_handshake(handshake(cfg));
        const TrialRecord rec = run_trial(test_scene(), trials()[0], external, cfg);
        EXPECT_EQ(rec.outcome, Outcome::Fault);
        EXPECT_NE(rec.fault.find("kaboom"), std::string::npos);
    }
    agent.join();
}

TEST(ServeAgent, NonFiniteCommandSendsFaultFrame) {
    auto [bench_side, agent_side] = transport_pair();
    NonFinite algo;
    std::thread agent([&, t = std::move(agent_side)] { (void)serve_agent(*t, algo); });
    bench_side->send(handshake(SimConfig{}));
    ASSERT_TRUE(std::holds_alternative<wire::HandshakeAck>(bench_side->receive(2.0)));
    bench_side->send(TrialInfo{0, trials()[0]});
    bench_side->send(Observation{});
    const wire::Message reply = bench_side->receive(2.0);
    agent.join();
    ASSERT_TRUE(std::holds_alternative<wire::Fault>(reply));
    EXPECT_NE(std::get<wire::Fault>(reply).message.find("non-finite"), std::string::npos);
}

TEST(ExternalAlgorithm, TrialBeforeHandshakeRejected) {
    auto [a, b] = transport_pair();
    ExternalAlgorithm external(std::move(a));
    EXPECT_THROW(external.on_trial_start(TrialInfo{}), ProtocolError);
}

TEST(ExternalAlgorithm, SilentPeerTripsWatchdog) {
    auto [bench_side, agent_side] = transport_pair();
    std::thread agent([t = std::move(agent_side)] {
        (void)t->receive(2.0);
        t->send(wire::HandshakeAck{kProtocolVersion, "sleepy"});
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
    });
    ExternalAlgorithm external(std::move(bench_side), 0.1);
    SimConfig cfg;
    external.on_handshake(handshake(cfg));
    const TrialRecord rec = run_trial(test_scene(), trials()[0], external, cfg);
    EXPECT_EQ(rec.outcome, Outcome::Fault);
    agent.join();
}

#ifdef GAPBENCH_AGENT_PATH
TEST(ReferenceAgent, StdioMatchesInProcess) {
    auto child = ChildProcessTransport::spawn({GAPBENCH_AGENT_PATH, "--algorithm", "reactive"});
    ExternalAlgorithm external(std::move(child), 2.0);
    check_against_in_process(external, "reactive");
}

TEST(ReferenceAgent, UnixSocketMatchesInProcess) {
    const std::string path =
        (std::filesystem::temp_directory_path() / ("gapbench-test-" + std::to_string(::getpid()) + ".sock")).string();
    UnixSocketListener listener(path);
    ChildProcess child({GAPBENCH_AGENT_PATH, "--algorithm", "straight-line", "--connect", "unix:" + path});
    ExternalAlgorithm external(listener.accept(5.0), 2.0);
    check_against_in_process(external, "straight-line");
}

TEST(ReferenceAgent, MissingExecutableFails) {
    EXPECT_ANY_THROW({
        auto child = ChildProcessTransport::spawn({"/nonexistent/agent-binary"});
        ExternalAlgorithm external(std::move(child), 0.5, 0.5);
        external.on_handshake(handshake(SimConfig{}));
    });
}
#endif
