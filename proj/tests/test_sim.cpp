// Fleet simulator: determinism, conservation, queueing behaviour, adversary
// scenarios and the message-level attack experiments.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "zaps/sim.hpp"
#include "zaps/stats.hpp"

using namespace zaps;
using namespace zaps::sim;

namespace {

SimConfig small_cfg(uint64_t seed, uint32_t uavs = 4, uint32_t sessions = 3) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.uavs = uavs;
    cfg.sessions_per_uav = sessions;
    return cfg;
}

void check_conservation(const SwarmMetrics& m) {
    CHECK(m.emitted == m.delivered + m.dropped + m.intercepted);
}

}  // namespace

TEST_CASE("config validation rejects out-of-range fields") {
    SimConfig cfg;
    CHECK_NOTHROW(validate_config(cfg));
    SimConfig bad = cfg;
    bad.uavs = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.uavs = 1001;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.loss = 1.5;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.delay_min_us = 9000;
    bad.delay_max_us = 100;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.sessions_per_uav = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.waypoint_mix = {};
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = cfg;
    bad.waypoint_mix = {5, 7};  // 7 is not a supported circuit size
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
}

TEST_CASE("honest fleet: every session confirms, bytes and frames balance") {
    SimConfig cfg = small_cfg(42);
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.sessions == 12);
    CHECK(m.confirmed == 12);
    CHECK(m.aborted.empty());
    // Payload bytes only: the eight fixed-size messages per session.
    CHECK(m.bytes_total == 12 * wire::kSessionBytes);
    CHECK(m.bytes_per_uav == doctest::Approx(12.0 * wire::kSessionBytes / 4.0));
    CHECK(m.dropped == 0);
    CHECK(m.intercepted == 0);
    CHECK(m.injected == 0);
    check_conservation(m);
    CHECK(m.nonces_unique);
    CHECK(m.confirmed_with_known_key == 0);
    CHECK(m.end_us > 0);
    CHECK(m.event_log_hash.size() == 64);
    CHECK(m.events.empty());  // record_events off by default

    // Queueing partition: proof step plus the rest is the whole handling.
    CHECK(m.mean_handling_ms ==
          doctest::Approx(m.mean_proof_ms + m.mean_session_ms).epsilon(1e-9));
    CHECK(m.mean_proof_ms > 0);
}

TEST_CASE("identical configs replay to the identical event stream") {
    SimConfig cfg = small_cfg(1234);
    SwarmMetrics a = run_swarm(cfg);
    SwarmMetrics b = run_swarm(cfg);
    CHECK(a.event_log_hash == b.event_log_hash);
    CHECK(a.end_us == b.end_us);
    CHECK(a.confirmed == b.confirmed);
    CHECK(a.mean_handling_ms == doctest::Approx(b.mean_handling_ms).epsilon(1e-12));

    SimConfig other = cfg;
    other.seed = 1235;
    SwarmMetrics c = run_swarm(other);
    CHECK(a.event_log_hash != c.event_log_hash);

    cfg.record_events = true;
    SwarmMetrics d = run_swarm(cfg);
    CHECK(d.event_log_hash == a.event_log_hash);  // recording does not perturb
    CHECK(!d.events.empty());
    CHECK(d.events.front().t_us <= d.events.back().t_us);
}

TEST_CASE("extended accounting adds per-waypoint proof bytes") {
    SimConfig cfg = small_cfg(7, 2, 2);
    cfg.waypoint_mix = {5};
    cfg.extended_mode = true;
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.confirmed == 4);
    CHECK(m.bytes_total == 4 * (wire::kSessionBytes + 5 * (128 + 32)));
}

TEST_CASE("lossy channel: sessions stall but frame accounting still balances") {
    SimConfig cfg = small_cfg(9, 6, 5);
    cfg.loss = 0.12;
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.sessions == 30);
    CHECK(m.confirmed < m.sessions);
    CHECK(m.dropped > 0);
    CHECK(m.aborted.count("lost"));
    check_conservation(m);
}

TEST_CASE("server handling time grows with fleet size and fits a line") {
    SimConfig base;
    base.seed = 3;
    std::vector<double> xs, ys;
    for (uint32_t n : {10u, 40u, 80u}) {
        SimConfig cfg = sweep_point(base, n, 160);
        SwarmMetrics m = run_swarm(cfg);
        CHECK(m.confirmed == m.sessions);
        xs.push_back(n);
        ys.push_back(m.mean_handling_ms);
    }
    CHECK(stats::non_decreasing(ys, 0.05));
    stats::LinearFit fit = stats::linear_fit(xs, ys);
    CHECK(fit.slope > 0);
    CHECK(fit.r2 >= 0.9);
    // Light fleet sits near the no-queue service demand (9 ms of virtual
    // processing), the full fleet visibly above it.
    CHECK(ys.front() > 8.5);
    CHECK(ys.front() < 10.0);
    CHECK(ys.back() > ys.front() + 1.0);
}

TEST_CASE("recorded-frame replay: duplicates are refused at every layer") {
    // Out-of-window duplicates die on freshness.
    SimConfig cfg = small_cfg(21, 3, 3);
    cfg.adversary.kind = AdversaryKind::Replay;
    cfg.adversary.target_tag = 1;
    cfg.adversary.delay_ms = 3000;
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.confirmed == m.sessions);
    CHECK(m.injected == m.sessions);  // one duplicate per recorded hello
    CHECK(m.inject_rejected == m.injected);
    CHECK(m.observed == m.sessions);
    CHECK(m.nonces_unique);  // never reached the nonce registry
    check_conservation(m);

    // In-window duplicates get past freshness and die on the nonce registry.
    cfg.adversary.delay_ms = 900;
    SwarmMetrics n = run_swarm(cfg);
    CHECK(n.confirmed == n.sessions);
    CHECK(n.inject_rejected == n.injected);
    CHECK_FALSE(n.nonces_unique);  // the registry saw the repeat

    // A replayed proof message lands after its session closed.
    cfg.adversary.target_tag = 5;
    cfg.adversary.delay_ms = 3000;
    SwarmMetrics p = run_swarm(cfg);
    CHECK(p.confirmed == p.sessions);
    CHECK(p.injected == p.sessions);
    CHECK(p.inject_rejected == p.injected);
}

TEST_CASE("active interception yields no session on an adversary-known key") {
    SimConfig cfg = small_cfg(31, 4, 2);
    cfg.adversary.kind = AdversaryKind::Mitm;
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.confirmed == 0);
    CHECK(m.confirmed_with_known_key == 0);
    CHECK(m.aborted.at("auth-failure") == m.sessions);
    CHECK(m.intercepted == 2 * m.sessions);  // both hellos of every session
    check_conservation(m);
}

TEST_CASE("passive interception observes but does not disturb") {
    SimConfig cfg = small_cfg(32, 4, 2);
    cfg.adversary.kind = AdversaryKind::Mitm;
    cfg.adversary.passive = true;
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.confirmed == m.sessions);
    CHECK(m.confirmed_with_known_key == 0);
    CHECK(m.observed == 8 * m.sessions);  // every end-to-end frame copied
    CHECK(m.intercepted == 0);
    check_conservation(m);
}

TEST_CASE("one flipped bit in transit fails exactly the touched check") {
    SimConfig cfg = small_cfg(33, 3, 2);
    cfg.adversary.kind = AdversaryKind::TamperBit;
    cfg.adversary.target_tag = 5;
    cfg.adversary.bit = 700;  // inside the route-proof envelope
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.confirmed == 0);
    CHECK(m.aborted.at("proof-reject") == m.sessions);
    CHECK(m.intercepted == m.sessions);
    check_conservation(m);

    cfg.adversary.bit = 1700;  // inside the auth token
    SwarmMetrics n = run_swarm(cfg);
    CHECK(n.confirmed == 0);
    CHECK(n.aborted.at("auth-failure") == n.sessions);
}

TEST_CASE("forged hello for a registered alias is refused") {
    SimConfig cfg = small_cfg(34, 3, 2);
    cfg.adversary.kind = AdversaryKind::Impersonate;
    cfg.adversary.target_role = Role::User;
    SwarmMetrics m = run_swarm(cfg);
    CHECK(m.confirmed == m.sessions - 1);
    CHECK(m.aborted.at("auth-failure") == 1);
    CHECK(m.intercepted == 1);
    CHECK(m.confirmed_with_known_key == 0);
    check_conservation(m);
}

TEST_CASE("exhaustive single-bit tamper sweep rejects all flips") {
    DeploymentParams params;
    params.seed = 11;
    TamperSweep sw = run_tamper_sweep(params, 5);
    CHECK(sw.trials == uint64_t(wire::kSessionBytes) * 8);
    CHECK(sw.trials == 11168);
    CHECK(sw.rejected == sw.trials);
    CHECK(sw.controls == 8);
    CHECK(sw.controls_accepted == 8);
    CHECK(sw.buckets.count("accepted") == 0);
    for (size_t i = 0; i < 8; ++i) {
        CHECK(sw.per_msg_trials[i] == wire::kMsgSize[i] * 8);
        CHECK(sw.per_msg_rejected[i] == sw.per_msg_trials[i]);
    }
    // Flips inside the three proof envelopes: the verifier catches most of
    // them; the rest (envelope padding) fall through to the MAC.
    uint64_t proof_total = 0;
    for (auto& [k, v] : sw.proof_buckets) proof_total += v;
    CHECK(proof_total == 3 * 128 * 8);
    CHECK(sw.proof_buckets.at("proof-reject") >= proof_total / 2);
    CHECK(sw.proof_buckets.count("accepted") == 0);
}

TEST_CASE("tamper sweep holds for the circuit-based backend on proof fields") {
    DeploymentParams params;
    params.seed = 12;
    params.backend = snark::Backend::Qap;
    HonestRun hr(params, 6);
    REQUIRE(hr.confirmed());
    // Proof envelopes of the three proof-bearing messages, all 1024 bits
    // each; with this backend the whole envelope is verified, so every flip
    // dies at the proof check before the MAC is even consulted.
    struct Span {
        size_t msg, lo, hi;
    };
    for (Span sp : {Span{5, 80, 208}, Span{6, 128, 256}, Span{7, 80, 208}}) {
        size_t rejected = 0, proof_rejects = 0, trials = 0;
        const Bytes& orig = hr.payload(sp.msg);
        for (size_t byte = sp.lo; byte < sp.hi; byte += 7) {  // sampled stride
            for (size_t b = 0; b < 8; ++b) {
                Bytes mod = orig;
                mod[byte] ^= uint8_t(1u << b);
                auto o = hr.deliver(sp.msg, mod);
                trials++;
                if (o.rejected) rejected++;
                if (o.bucket == "proof-reject") proof_rejects++;
            }
        }
        CHECK(rejected == trials);
        CHECK(proof_rejects == trials);
    }
}

TEST_CASE("recorded honest messages replayed against the closed session") {
    DeploymentParams params;
    params.seed = 13;
    HonestRun hr(params, 7);
    REQUIRE(hr.confirmed());
    for (size_t k = 1; k <= 8; ++k) {
        CAPTURE(k);
        auto in_window = hr.replay(k, 10);
        CHECK(in_window.rejected);
        CHECK(in_window.bucket == "replay-reject");
        auto late = hr.replay(k, 3000);
        CHECK(late.rejected);
        CHECK(late.bucket == "replay-reject");
    }
}

TEST_CASE("compromised drone store: forged relay passes, authorization fails") {
    for (auto backend : {snark::Backend::Schnorr, snark::Backend::Qap}) {
        CAPTURE(int(backend));
        DeploymentParams params;
        params.seed = 14;
        params.backend = backend;
        KciOutcome out = kci_probe(params, 99);
        CHECK(out.accepted_msg4);  // static-key compromise buys the MAC leg
        CHECK_FALSE(out.drone_confirmed);
        CHECK(out.reason == Reject::ProofReject);
    }
}

TEST_CASE("colluding endpoints cannot produce the user's secrets") {
    DeploymentParams params;
    params.seed = 15;
    CollusionOutcome out = collusion_probe(params, 77, 256);
    CHECK(out.secret_trials == 256);
    CHECK(out.secret_hits == 0);
    CHECK(out.binder_trials == 256);
    CHECK(out.binder_accepted == 0);
}

TEST_CASE("sweep points keep total measured sessions comparable") {
    SimConfig base;
    base.sessions_per_uav = 4;
    SimConfig a = sweep_point(base, 10, 600);
    CHECK(a.uavs == 10);
    CHECK(a.sessions_per_uav == 60);
    SimConfig b = sweep_point(base, 100, 600);
    CHECK(b.sessions_per_uav == 6);
    SimConfig c = sweep_point(base, 500, 600);
    CHECK(c.sessions_per_uav == 4);  // floor keeps runs meaningful

    SwarmMetrics m = run_swarm(small_cfg(2, 2, 2));
    std::string row = swarm_csv_row(m, 2);
    CHECK(swarm_csv_header().find("mean_handling_ms") != std::string::npos);
    CHECK(row.find("\r\n") == row.size() - 2);
    CHECK(row.substr(0, 2) == "2,");
}
