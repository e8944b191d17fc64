// Session protocol: registration, the eight-message exchange, freshness,
// replay handling and the failure discipline.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "zaps/protocol.hpp"

using namespace zaps;
using namespace zaps::proto;
using snark::Backend;

TEST_CASE("freshness window is strict and symmetric") {
    CHECK(check_freshness(1000, 1000, 2000));
    CHECK(check_freshness(1000, 2999, 2000));   // diff = 1999
    CHECK_FALSE(check_freshness(1000, 3000, 2000));  // diff = 2000, not < 2000
    CHECK_FALSE(check_freshness(3000, 1000, 2000));  // same, message from the future
    CHECK(check_freshness(2999, 1000, 2000));
    CHECK_FALSE(check_freshness(5, 5, 0));      // zero window rejects everything
    CHECK_FALSE(check_freshness(0, 0xffffffffu, 2000));
}

TEST_CASE("auth tokens bind key, tag, payload and timestamp") {
    Digest32 key = sha256(std::string_view("k"));
    Bytes payload(40, 0x5a);
    wire::AuthToken t = make_token(key, wire::MsgType::M5, payload, 777);
    CHECK(t.mac != t.kc);
    CHECK(check_token(key, wire::MsgType::M5, payload, 777, t));

    Digest32 other = sha256(std::string_view("k2"));
    CHECK_FALSE(check_token(other, wire::MsgType::M5, payload, 777, t));
    CHECK_FALSE(check_token(key, wire::MsgType::M6, payload, 777, t));
    CHECK_FALSE(check_token(key, wire::MsgType::M5, payload, 778, t));
    Bytes mutated = payload;
    mutated[3] ^= 1;
    CHECK_FALSE(check_token(key, wire::MsgType::M5, mutated, 777, t));

    // Each half is checked on its own.
    wire::AuthToken bad_kc = t;
    bad_kc.kc[0] ^= 1;
    CHECK_FALSE(check_token(key, wire::MsgType::M5, payload, 777, bad_kc));
    wire::AuthToken bad_mac = t;
    bad_mac.mac[31] ^= 0x80;
    CHECK_FALSE(check_token(key, wire::MsgType::M5, payload, 777, bad_mac));
}

TEST_CASE("transcript chain is order sensitive") {
    Bytes a{1, 2, 3}, b{4, 5};
    Digest32 c0 = chain_init();
    CHECK(chain_absorb(chain_absorb(c0, a), b) != chain_absorb(chain_absorb(c0, b), a));
    CHECK(chain_absorb(c0, a) != chain_absorb(c0, b));
}

TEST_CASE("reject buckets") {
    CHECK(std::string(reject_bucket(Reject::Stale)) == "replay-reject");
    CHECK(std::string(reject_bucket(Reject::Replay)) == "replay-reject");
    CHECK(std::string(reject_bucket(Reject::WrongPhase)) == "replay-reject");
    CHECK(std::string(reject_bucket(Reject::AuthFail)) == "auth-failure");
    CHECK(std::string(reject_bucket(Reject::TranscriptMismatch)) == "auth-failure");
    CHECK(std::string(reject_bucket(Reject::ProofReject)) == "proof-reject");
    CHECK(std::string(reject_bucket(Reject::WitnessInvalid)) == "proof-reject");
    CHECK(std::string(reject_name(Reject::Stale)) == "stale");
    CHECK(std::string(phase_name(Phase::Confirmed)) == "confirmed");
}

TEST_CASE("registration issues distinct aliases and symmetric static keys") {
    const ec::Curve& c = ec::curve_by_id(ec::CurveId::Secp256k1);
    Rng rng(42);
    auto ps = std::make_shared<snark::ProofSystem>(c, 9001);
    Rng srv_rng = rng.child("srv");
    ServerCore server(ps, srv_rng);

    Rng u_rng = rng.child("u"), d_rng = rng.child("d");
    kex::KeyPair u = kex::gen_keypair(c, u_rng);
    kex::KeyPair d = kex::gen_keypair(c, d_rng);

    Registration ru = server.register_user("alice", "pw", u.pub);
    Registration rd = server.register_drone("uav-7", d.pub);
    CHECK(ru.alias != rd.alias);
    CHECK(ru.binder != rd.binder);

    // DH symmetry: the entity derives the same static key from its secret and
    // the server's public point.
    CHECK(ru.smk == static_key(c, u.secret, server.static_pub()));
    CHECK(rd.smk == static_key(c, d.secret, server.static_pub()));
    CHECK(ru.smk != rd.smk);

    // Same identity string enrolled twice collides on the alias.
    CHECK_THROWS_AS(server.register_user("alice", "pw", u.pub), std::invalid_argument);
    CHECK_THROWS_AS(server.register_drone("uav-7", d.pub), std::invalid_argument);

    // Identity-point public keys are refused outright.
    CurvePoint ident;
    ident.curve = c.id();
    CHECK_THROWS_AS(server.register_user("mallory", "pw", ident), std::invalid_argument);
}

namespace {

// A deployment plus freshly constructed agents, for tests that drive the
// exchange one message at a time.
struct Live {
    Deployment dep;
    UserAgent user;
    DroneAgent drone;
    Rng ur, dr, sr;
    uint32_t t = 0;

    explicit Live(const DeploymentParams& p, uint64_t run_seed = 777)
        : dep(make_deployment(p)), user(dep.ps, dep.user_cfg), drone(dep.ps, dep.drone_cfg),
          ur(Rng(run_seed).child("u").seed()), dr(Rng(run_seed).child("d").seed()),
          sr(Rng(run_seed).child("s").seed()) {}

    ServerCore& server() { return *dep.server; }

    // Runs the init phase honestly; leaves both endpoints Authenticated.
    std::pair<wire::Msg3, wire::Msg4> init() {
        auto m1 = user.begin(t, ur);
        REQUIRE(m1.ok());
        auto m2 = drone.begin(t, dr);
        REQUIRE(m2.ok());
        uint32_t sent = t;
        t += 3;
        auto p34 = server().process_init(*m1.value, sent, *m2.value, sent, t, sr);
        REQUIRE(p34.ok());
        uint32_t relay = t;
        t += 3;
        REQUIRE(user.on_msg3(p34.value->first, relay, t).ok());
        REQUIRE(drone.on_msg4(p34.value->second, relay, t).ok());
        REQUIRE(finalize_session_keys(user, drone, t).ok());
        return *p34.value;
    }

    wire::Msg5 msg5() {
        t += 3;
        auto m5 = user.prove_path(t, ur);
        REQUIRE(m5.ok());
        return *m5.value;
    }
};

}  // namespace

TEST_CASE("honest end-to-end session, both backends") {
    for (Backend backend : {Backend::Schnorr, Backend::Qap}) {
        CAPTURE(snark::backend_name(backend));
        Deployment dep = make_deployment({4101, backend, 5});
        SessionTrace tr = run_direct_session(dep, 31);

        CHECK(tr.failure == Reject::None);
        CHECK(tr.user_phase == Phase::Confirmed);
        CHECK(tr.drone_phase == Phase::Confirmed);
        CHECK(tr.server_phase == Phase::Confirmed);
        REQUIRE(tr.frames.size() == 8);
        for (size_t i = 0; i < 8; ++i) {
            CHECK(tr.frames[i].tag == i + 1);
            CHECK(tr.frames[i].payload.size() == wire::kMsgSize[i]);
        }
        // The forwarded server proof rides only on the relayed frame.
        CHECK(tr.frames[6].aux.size() == 128);
        CHECK(tr.frames[0].aux.empty());

        CHECK(tr.overhead.init_subtotal() == 480);
        CHECK(tr.overhead.proof_subtotal() == 916);
        CHECK(tr.overhead.total() == 1396);

        // Both endpoints land on the same session key without the server
        // ever holding it.
        CHECK(tr.user_sk.key == tr.drone_sk.key);
        CHECK(tr.user_sk.tag == tr.drone_sk.tag);
        CHECK(tr.user_sk.point == tr.drone_sk.point);
        CHECK(tr.user_sk.key != Digest32{});
        CHECK(tr.end_ms > 0);

        auto view = dep.server->session_by_rid(dep.user_cfg.reg.alias);
        REQUIRE(view.has_value());
        CHECK(view->phase == Phase::Confirmed);
        CHECK(dep.server->nonces_unique());
    }
}

TEST_CASE("same seeds reproduce the identical byte trace") {
    Deployment a = make_deployment({7337, Backend::Schnorr, 5});
    Deployment b = make_deployment({7337, Backend::Schnorr, 5});
    SessionTrace ta = run_direct_session(a, 99);
    SessionTrace tb = run_direct_session(b, 99);
    REQUIRE(ta.frames.size() == tb.frames.size());
    for (size_t i = 0; i < ta.frames.size(); ++i) {
        CHECK(wire::encode_frame(ta.frames[i]) == wire::encode_frame(tb.frames[i]));
    }

    // A different session seed re-randomizes the ephemerals.
    SessionTrace tc = run_direct_session(a, 100);
    CHECK(tc.failure == Reject::None);
    CHECK(tc.frames[0].payload != ta.frames[0].payload);
    CHECK(tc.user_sk.key != ta.user_sk.key);
    CHECK(a.server->nonces_unique());
}

TEST_CASE("session runs on the toy curve too") {
    Deployment dep = make_deployment({5, Backend::Schnorr, 5, kDefaultWindowMs,
                                      ec::CurveId::Tiny17});
    SessionTrace tr = run_direct_session(dep, 8);
    CHECK(tr.failure == Reject::None);
    CHECK(tr.user_phase == Phase::Confirmed);
    CHECK(tr.overhead.total() == 1396);
}

TEST_CASE("operations outside their phase are refused without side effects") {
    Live lv({600, Backend::Schnorr, 5});

    // Receiving before sending anything.
    wire::Msg3 m3{};
    auto r = lv.user.on_msg3(m3, 0, 0);
    CHECK_FALSE(r.ok());
    CHECK(r.reason == Reject::WrongPhase);
    CHECK(lv.user.phase() == Phase::Registered);  // unchanged, not Failed

    auto pr = lv.user.prove_path(0, lv.ur);
    CHECK(pr.reason == Reject::WrongPhase);
    CHECK(lv.user.phase() == Phase::Registered);

    wire::Msg6 m6{};
    auto d = lv.drone.on_msg6(m6, 0, 0, lv.dr);
    CHECK(d.reason == Reject::WrongPhase);
    CHECK(lv.drone.phase() == Phase::Registered);

    // Double begin: ephemerals are single-use.
    REQUIRE(lv.user.begin(0, lv.ur).ok());
    auto again = lv.user.begin(1, lv.ur);
    CHECK(again.reason == Reject::WrongPhase);
    CHECK(lv.user.phase() == Phase::InitSent);

    // Server side: proof and final before any init.
    wire::Msg5 m5{};
    CHECK(lv.server().process_proof(m5, 0, 0, lv.sr).reason == Reject::UnknownPeer);
    wire::Msg8 m8{};
    CHECK(lv.server().process_final(m8, 0, 0).reason == Reject::UnknownPeer);
}

TEST_CASE("init rejects bad binders, stale hellos and foreign aliases") {
    Live lv({601, Backend::Schnorr, 5});
    auto m1 = lv.user.begin(0, lv.ur);
    REQUIRE(m1.ok());
    auto m2 = lv.drone.begin(0, lv.dr);
    REQUIRE(m2.ok());

    SUBCASE("unknown user alias") {
        wire::Msg1 bad = *m1.value;
        bad.rid[0] ^= 1;
        CHECK(lv.server().process_init(bad, 0, *m2.value, 0, 3, lv.sr).reason ==
              Reject::UnknownPeer);
    }
    SUBCASE("tampered identity binder") {
        wire::Msg1 bad = *m1.value;
        bad.i_u[5] ^= 1;
        CHECK(lv.server().process_init(bad, 0, *m2.value, 0, 3, lv.sr).reason ==
              Reject::AuthFail);
    }
    SUBCASE("tampered user ephemeral breaks the binder") {
        wire::Msg1 bad = *m1.value;
        bad.e_u[10] ^= 1;
        CHECK(lv.server().process_init(bad, 0, *m2.value, 0, 3, lv.sr).reason ==
              Reject::AuthFail);
    }
    SUBCASE("tampered drone token") {
        wire::Msg2 bad = *m2.value;
        bad.auth.mac[0] ^= 1;
        CHECK(lv.server().process_init(*m1.value, 0, bad, 0, 3, lv.sr).reason ==
              Reject::AuthFail);
    }
    SUBCASE("stale hello") {
        CHECK(lv.server().process_init(*m1.value, 0, *m2.value, 0, 5000, lv.sr).reason ==
              Reject::Stale);
    }
    SUBCASE("honest init still passes after the failed attempts above") {
        CHECK(lv.server().process_init(*m1.value, 0, *m2.value, 0, 3, lv.sr).ok());
    }
}

TEST_CASE("replayed hellos are caught by the nonce registry") {
    Deployment dep = make_deployment({602, Backend::Schnorr, 5});
    SessionTrace tr = run_direct_session(dep, 1);
    REQUIRE(tr.failure == Reject::None);

    // Retransmit the captured hello frames unchanged right after the session
    // closed. Their timestamps are still inside the freshness window and the
    // tokens still verify, so only the nonce registry stands in the way.
    auto m1 = wire::decode_msg1(tr.frames[0].payload);
    auto m2 = wire::decode_msg2(tr.frames[1].payload);
    REQUIRE(m1.has_value());
    REQUIRE(m2.has_value());
    Rng sr(5);
    uint32_t now = tr.end_ms + 10;
    auto r = dep.server->process_init(*m1, tr.frames[0].sender_ts, *m2,
                                      tr.frames[1].sender_ts, now, sr);
    CHECK_FALSE(r.ok());
    CHECK(r.reason == Reject::Replay);
    CHECK(std::string(reject_bucket(r.reason)) == "replay-reject");
    CHECK_FALSE(dep.server->nonces_unique());

    // A delayed retransmission falls to the freshness check instead.
    Deployment dep2 = make_deployment({602, Backend::Schnorr, 5});
    SessionTrace tr2 = run_direct_session(dep2, 1);
    auto d1 = wire::decode_msg1(tr2.frames[0].payload);
    auto d2 = wire::decode_msg2(tr2.frames[1].payload);
    auto late = dep2.server->process_init(*d1, tr2.frames[0].sender_ts, *d2,
                                          tr2.frames[1].sender_ts, 60'000, sr);
    CHECK(late.reason == Reject::Stale);
}

TEST_CASE("proof phase failure discipline") {
    SUBCASE("flipped proof byte reports proof-reject and fails the session") {
        for (Backend backend : {Backend::Schnorr, Backend::Qap}) {
            CAPTURE(snark::backend_name(backend));
            Live lv({603, backend, 5});
            lv.init();
            wire::Msg5 m5 = lv.msg5();
            m5.proof[60] ^= 0x10;
            uint32_t sent = lv.t;
            auto r = lv.server().process_proof(m5, sent, sent + 3, lv.sr);
            CHECK(r.reason == Reject::ProofReject);
            auto view = lv.server().session_by_rid(lv.dep.user_cfg.reg.alias);
            REQUIRE(view.has_value());
            CHECK(view->phase == Phase::Failed);
            CHECK(view->reason == Reject::ProofReject);
        }
    }
    SUBCASE("flipped token byte reports auth-failure") {
        Live lv({604, Backend::Schnorr, 5});
        lv.init();
        wire::Msg5 m5 = lv.msg5();
        m5.auth.kc[8] ^= 1;
        auto r = lv.server().process_proof(m5, lv.t, lv.t + 3, lv.sr);
        CHECK(r.reason == Reject::AuthFail);
    }
    SUBCASE("foreign commitment reports unknown-statement") {
        Live lv({605, Backend::Schnorr, 5});
        lv.init();
        wire::Msg5 m5 = lv.msg5();
        m5.p_u[0] ^= 1;
        CHECK(lv.server().process_proof(m5, lv.t, lv.t + 3, lv.sr).reason ==
              Reject::UnknownStatement);
    }
    SUBCASE("stale proof reports stale") {
        Live lv({606, Backend::Schnorr, 5});
        lv.init();
        wire::Msg5 m5 = lv.msg5();
        auto r = lv.server().process_proof(m5, lv.t, lv.t + 5000, lv.sr);
        CHECK(r.reason == Reject::Stale);
        CHECK(std::string(reject_bucket(r.reason)) == "replay-reject");
    }
}

TEST_CASE("duplicate proof delivery does not destroy the live session") {
    Live lv({607, Backend::Schnorr, 5});
    lv.init();
    wire::Msg5 m5 = lv.msg5();
    uint32_t sent = lv.t;
    lv.t += 3;
    auto m6 = lv.server().process_proof(m5, sent, lv.t, lv.sr);
    REQUIRE(m6.ok());

    // Same Msg5 again: the session already advanced, so this is an
    // out-of-phase duplicate. Rejected, session state untouched.
    auto dup = lv.server().process_proof(m5, sent, lv.t + 1, lv.sr);
    CHECK(dup.reason == Reject::WrongPhase);
    auto view = lv.server().session_by_rid(lv.dep.user_cfg.reg.alias);
    REQUIRE(view.has_value());
    CHECK(view->phase == Phase::ProofSent);

    // The exchange still completes after the replay attempt.
    uint32_t relay6 = lv.t;
    lv.t += 3;
    auto m7 = lv.drone.on_msg6(*m6.value, relay6, lv.t, lv.dr);
    REQUIRE(m7.ok());
    uint32_t sent7 = lv.t;
    lv.t += 3;
    REQUIRE(lv.server().relay_msg7(m7.value->msg).ok());
    lv.t += 3;
    auto m8 = lv.user.on_msg7(m7.value->msg, m7.value->aux, sent7, lv.t);
    REQUIRE(m8.ok());
    uint32_t sent8 = lv.t;
    lv.t += 3;
    CHECK(lv.server().process_final(*m8.value, sent8, lv.t).ok());
    CHECK(lv.server().session_by_rid(lv.dep.user_cfg.reg.alias)->phase == Phase::Confirmed);
    CHECK(lv.user.phase() == Phase::Confirmed);
    CHECK(lv.drone.phase() == Phase::Confirmed);
}

TEST_CASE("endpoint checks on the downlink messages") {
    SUBCASE("tampered Msg3 fails the user with auth-failure and wipes keys") {
        Live lv({608, Backend::Schnorr, 5});
        auto m1 = lv.user.begin(0, lv.ur);
        REQUIRE(m1.ok());
        auto m2 = lv.drone.begin(0, lv.dr);
        REQUIRE(m2.ok());
        auto p34 = lv.server().process_init(*m1.value, 0, *m2.value, 0, 3, lv.sr);
        REQUIRE(p34.ok());
        wire::Msg3 bad = p34.value->first;
        bad.e_d[4] ^= 1;
        auto r = lv.user.on_msg3(bad, 3, 6);
        CHECK(r.reason == Reject::AuthFail);
        CHECK(lv.user.phase() == Phase::Failed);
        CHECK(lv.user.sk().key == Digest32{});
    }
    SUBCASE("tampered server proof in Msg6 is refused by the drone") {
        Live lv({609, Backend::Qap, 5});
        lv.init();
        wire::Msg5 m5 = lv.msg5();
        uint32_t sent = lv.t;
        lv.t += 3;
        auto m6 = lv.server().process_proof(m5, sent, lv.t, lv.sr);
        REQUIRE(m6.ok());
        wire::Msg6 bad = *m6.value;
        bad.proof[100] ^= 2;
        auto r = lv.drone.on_msg6(bad, lv.t, lv.t + 3, lv.dr);
        CHECK(r.reason == Reject::ProofReject);
        CHECK(lv.drone.phase() == Phase::Failed);
    }
    SUBCASE("user refuses a relayed Msg7 with a short or tampered aux") {
        Live lv({610, Backend::Schnorr, 5});
        lv.init();
        wire::Msg5 m5 = lv.msg5();
        uint32_t sent = lv.t;
        lv.t += 3;
        auto m6 = lv.server().process_proof(m5, sent, lv.t, lv.sr);
        REQUIRE(m6.ok());
        uint32_t relay6 = lv.t;
        lv.t += 3;
        auto m7 = lv.drone.on_msg6(*m6.value, relay6, lv.t, lv.dr);
        REQUIRE(m7.ok());
        uint32_t sent7 = lv.t;
        lv.t += 6;
        Bytes short_aux(64, 0);
        auto r = lv.user.on_msg7(m7.value->msg, short_aux, sent7, lv.t);
        CHECK(r.reason == Reject::ProofReject);
        CHECK(lv.user.phase() == Phase::Failed);
    }
}

TEST_CASE("final ack binds the transcript chain") {
    Live lv({611, Backend::Schnorr, 5});
    lv.init();
    wire::Msg5 m5 = lv.msg5();
    uint32_t sent5 = lv.t;
    lv.t += 3;
    auto m6 = lv.server().process_proof(m5, sent5, lv.t, lv.sr);
    REQUIRE(m6.ok());
    uint32_t relay6 = lv.t;
    lv.t += 3;
    auto m7 = lv.drone.on_msg6(*m6.value, relay6, lv.t, lv.dr);
    REQUIRE(m7.ok());
    uint32_t sent7 = lv.t;
    lv.t += 3;
    REQUIRE(lv.server().relay_msg7(m7.value->msg).ok());
    lv.t += 3;
    auto m8 = lv.user.on_msg7(m7.value->msg, m7.value->aux, sent7, lv.t);
    REQUIRE(m8.ok());

    SUBCASE("corrupted chain value") {
        wire::Msg8 bad = *m8.value;
        bad.i_us[0] ^= 1;
        // The MAC covers the chain field, so the failure surfaces there.
        auto r = lv.server().process_final(bad, lv.t, lv.t + 3);
        CHECK(r.reason == Reject::AuthFail);
    }
    SUBCASE("honest ack confirms") {
        CHECK(lv.server().process_final(*m8.value, lv.t, lv.t + 3).ok());
    }
}

TEST_CASE("server transcript diverges when the relay is skipped") {
    // If the server never absorbs the drone's Msg7, its chain stays one
    // message short and the user's final binder cannot match.
    Live lv({612, Backend::Schnorr, 5});
    lv.init();
    wire::Msg5 m5 = lv.msg5();
    uint32_t sent5 = lv.t;
    lv.t += 3;
    auto m6 = lv.server().process_proof(m5, sent5, lv.t, lv.sr);
    REQUIRE(m6.ok());
    uint32_t relay6 = lv.t;
    lv.t += 3;
    auto m7 = lv.drone.on_msg6(*m6.value, relay6, lv.t, lv.dr);
    REQUIRE(m7.ok());
    uint32_t sent7 = lv.t;
    lv.t += 6;
    auto m8 = lv.user.on_msg7(m7.value->msg, m7.value->aux, sent7, lv.t);
    REQUIRE(m8.ok());
    // relay_msg7 deliberately omitted.
    auto r = lv.server().process_final(*m8.value, lv.t, lv.t + 3);
    CHECK(r.reason == Reject::TranscriptMismatch);
}

TEST_CASE("prover refuses a witness that does not match the filed statement") {
    for (Backend backend : {Backend::Schnorr, Backend::Qap}) {
        CAPTURE(snark::backend_name(backend));
        Deployment dep = make_deployment({613, backend, 5});
        // The user deviates from the filed route before proving.
        dep.user_cfg.path.points[2].x ^= 0x0101;
        UserAgent user(dep.ps, dep.user_cfg);
        DroneAgent drone(dep.ps, dep.drone_cfg);
        Rng ur(1), dr(2), sr(3);
        auto m1 = user.begin(0, ur);
        REQUIRE(m1.ok());
        auto m2 = drone.begin(0, dr);
        REQUIRE(m2.ok());
        auto p34 = dep.server->process_init(*m1.value, 0, *m2.value, 0, 3, sr);
        REQUIRE(p34.ok());
        REQUIRE(user.on_msg3(p34.value->first, 3, 6).ok());
        auto m5 = user.prove_path(9, ur);
        CHECK_FALSE(m5.ok());
        CHECK(m5.reason == Reject::WitnessInvalid);
        CHECK(user.phase() == Phase::Failed);
        CHECK(std::string(reject_bucket(m5.reason)) == "proof-reject");
    }
}

TEST_CASE("cross-session key confirmation fails for unrelated endpoints") {
    // Authenticate a user in one deployment and a drone in another; their
    // session keys cannot agree.
    Live a({614, Backend::Schnorr, 5}, 1000);
    Live b({615, Backend::Schnorr, 5}, 2000);
    a.init();
    b.init();
    auto r = finalize_session_keys(a.user, b.drone, a.t);
    CHECK_FALSE(r.ok());
    CHECK(r.reason == Reject::KeyConfirmFail);

    // And a stale finalize aborts even a matched pair.
    Live c({616, Backend::Schnorr, 5});
    c.init();
    CHECK(finalize_session_keys(c.user, c.drone, c.t + 10'000).reason == Reject::Stale);
}

TEST_CASE("zero freshness window rejects the first exchange") {
    Deployment dep = make_deployment({617, Backend::Schnorr, 5, 0});
    SessionTrace tr = run_direct_session(dep, 1);
    CHECK(tr.failure == Reject::Stale);
    CHECK(tr.server_phase == Phase::Failed);
    CHECK(std::string(reject_bucket(tr.failure)) == "replay-reject");
}

TEST_CASE("waypoint classes other than five work end to end") {
    Deployment dep = make_deployment({618, Backend::Qap, 8});
    SessionTrace tr = run_direct_session(dep, 2);
    CHECK(tr.failure == Reject::None);
    CHECK(tr.user_phase == Phase::Confirmed);
}
