#include "zaps/protocol.hpp"

namespace zaps::proto {

using snark::Backend;
using snark::ProofEnvelope;
using wire::AuthToken;
using wire::MsgType;

bool check_freshness(uint32_t t_msg, uint32_t t_now, uint32_t window_ms) {
    uint64_t diff = t_msg > t_now ? uint64_t(t_msg) - t_now : uint64_t(t_now) - t_msg;
    return diff < window_ms;
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Idle: return "idle";
        case Phase::Registered: return "registered";
        case Phase::InitSent: return "init-sent";
        case Phase::Authenticated: return "authenticated";
        case Phase::ProofSent: return "proof-sent";
        case Phase::Confirmed: return "confirmed";
        case Phase::Failed: return "failed";
    }
    return "?";
}

const char* reject_name(Reject r) {
    switch (r) {
        case Reject::None: return "none";
        case Reject::Malformed: return "malformed";
        case Reject::UnknownPeer: return "unknown-peer";
        case Reject::WrongPhase: return "phase-violation";
        case Reject::Stale: return "stale";
        case Reject::Replay: return "replay";
        case Reject::AuthFail: return "auth-failure";
        case Reject::ProofReject: return "proof-reject";
        case Reject::WitnessInvalid: return "witness-invalid";
        case Reject::UnknownStatement: return "unknown-statement";
        case Reject::TranscriptMismatch: return "transcript-mismatch";
        case Reject::KeyConfirmFail: return "key-confirm-failure";
    }
    return "?";
}

const char* reject_bucket(Reject r) {
    switch (r) {
        case Reject::None: return "none";
        case Reject::Stale:
        case Reject::Replay:
        case Reject::WrongPhase: return "replay-reject";
        case Reject::AuthFail:
        case Reject::TranscriptMismatch:
        case Reject::KeyConfirmFail: return "auth-failure";
        case Reject::ProofReject:
        case Reject::WitnessInvalid: return "proof-reject";
        case Reject::Malformed:
        case Reject::UnknownPeer:
        case Reject::UnknownStatement: return "malformed";
    }
    return "?";
}

// ---- recipes ---------------------------------------------------------------

AuthToken make_token(const Digest32& key, MsgType tag, const Bytes& payload_zeroed,
                     uint32_t ts) {
    Bytes mac_in;
    append(mac_in, std::string_view("ZAPS-mac"));
    append(mac_in, key);
    mac_in.push_back(static_cast<uint8_t>(tag));
    append(mac_in, payload_zeroed);
    append_u32be(mac_in, ts);
    AuthToken t;
    t.mac = sha256(mac_in);
    Bytes kc_in;
    append(kc_in, std::string_view("ZAPS-kc"));
    append(kc_in, key);
    append(kc_in, t.mac);
    t.kc = sha256(kc_in);
    return t;
}

bool check_token(const Digest32& key, MsgType tag, const Bytes& payload_zeroed, uint32_t ts,
                 const AuthToken& token) {
    AuthToken expect = make_token(key, tag, payload_zeroed, ts);
    bool mac_ok = ct_equal(expect.mac, token.mac);
    bool kc_ok = ct_equal(expect.kc, token.kc);
    return mac_ok && kc_ok;
}

Digest32 static_key(const Curve& curve, const ec::Scalar& secret, const CurvePoint& peer_pub) {
    kex::SharedSecret s = kex::ecdh(curve, secret, peer_pub);
    Bytes buf;
    append(buf, std::string_view("ZAPS-smk"));
    append(buf, curve.encode_x(curve.normalize_even(s.point)));
    return sha256(buf);
}

Id16 alias16(const Digest32& d) {
    Id16 a;
    std::memcpy(a.data(), d.data(), 16);
    return a;
}

Digest32 chain_init() { return sha256(std::string_view("ZAPS-transcript")); }

Digest32 chain_absorb(const Digest32& prev, const Bytes& payload) {
    Bytes buf;
    append(buf, prev);
    append(buf, payload);
    return sha256(buf);
}

namespace {

Digest32 identity_binder(const Digest32& reg_binder, const wire::X32& eph, const Id16& alias) {
    Bytes buf;
    append(buf, std::string_view("ZAPS-i1"));
    append(buf, reg_binder);
    append(buf, eph);
    append(buf, alias);
    return sha256(buf);
}

Digest32 leg_key(std::string_view domain, const Digest32& smk, const wire::X32& e_u,
                 const wire::X32& e_d, const Id16& sid) {
    Bytes buf;
    append(buf, domain);
    append(buf, smk);
    append(buf, e_u);
    append(buf, e_d);
    append(buf, sid);
    return sha256(buf);
}

Id16 session_id(const wire::X32& e_u, const wire::X32& e_d) {
    Bytes buf;
    append(buf, std::string_view("ZAPS-sid"));
    append(buf, e_u);
    append(buf, e_d);
    return alias16(sha256(buf));
}

Id16 session_uid(const Id16& rid, const Id16& sid) {
    Bytes buf;
    append(buf, std::string_view("ZAPS-uid"));
    append(buf, rid);
    append(buf, sid);
    return alias16(sha256(buf));
}

Bytes sk_transcript(const wire::X32& e_u, const wire::X32& e_d, const wire::X32& server_x) {
    Bytes t;
    append(t, e_u);
    append(t, e_d);
    append(t, server_x);
    return t;
}

Digest32 final_binder(const Id16& sid, const Digest32& chain) {
    Bytes buf;
    append(buf, std::string_view("ZAPS-fin"));
    append(buf, sid);
    append(buf, chain);
    return sha256(buf);
}

// Payload image with the auth-token field zeroed, the common MAC input.
template <typename M>
Bytes zeroed(const M& m) {
    M copy = m;
    copy.auth = AuthToken{};
    return wire::encode(copy);
}

Digest32 envelope_digest(const wire::Proof128& p) {
    return sha256(Bytes(p.begin(), p.end()));
}

}  // namespace

// ---- server ----------------------------------------------------------------

ServerCore::ServerCore(std::shared_ptr<snark::ProofSystem> ps, Rng& rng, uint32_t window_ms)
    : ps_(std::move(ps)), static_kp_(kex::gen_keypair(ps_->curve(), rng)),
      window_ms_(window_ms) {}

Registration ServerCore::register_user(const std::string& id, const std::string& pwd,
                                       const CurvePoint& user_pub) {
    const Curve& c = ps_->curve();
    if (!c.on_curve(user_pub) || user_pub.inf) {
        throw std::invalid_argument("register_user: bad public key");
    }
    Digest32 smk = static_key(c, static_kp_.secret, user_pub);
    Bytes bbuf;
    append(bbuf, std::string_view("ZAPS-reg"));
    append(bbuf, pwd);
    append(bbuf, id);
    append(bbuf, smk);
    Digest32 binder = sha256(bbuf);
    Bytes abuf;
    append(abuf, std::string_view("ZAPS-rid"));
    append(abuf, std::string_view("user"));
    append(abuf, id);
    append(abuf, smk);
    Id16 alias = alias16(sha256(abuf));
    if (users_.count(alias)) throw std::invalid_argument("register_user: duplicate");
    users_[alias] = EntityRec{user_pub, binder, smk};
    return Registration{alias, binder, smk};
}

Registration ServerCore::register_drone(const std::string& id, const CurvePoint& drone_pub) {
    const Curve& c = ps_->curve();
    if (!c.on_curve(drone_pub) || drone_pub.inf) {
        throw std::invalid_argument("register_drone: bad public key");
    }
    Digest32 smk = static_key(c, static_kp_.secret, drone_pub);
    Bytes bbuf;
    append(bbuf, std::string_view("ZAPS-reg"));
    append(bbuf, std::string_view("drone"));
    append(bbuf, id);
    append(bbuf, smk);
    Digest32 binder = sha256(bbuf);
    Bytes abuf;
    append(abuf, std::string_view("ZAPS-rid"));
    append(abuf, std::string_view("drone"));
    append(abuf, id);
    append(abuf, smk);
    Id16 alias = alias16(sha256(abuf));
    if (drones_.count(alias)) throw std::invalid_argument("register_drone: duplicate");
    drones_[alias] = EntityRec{drone_pub, binder, smk};
    return Registration{alias, binder, smk};
}

size_t ServerCore::file_mission(const Id16& rid, const Id16& did,
                                const snark::Statement& st_user,
                                const snark::Statement& st_drone, Backend backend, Rng& rng) {
    if (!users_.count(rid)) throw std::invalid_argument("file_mission: unknown user");
    if (!drones_.count(did)) throw std::invalid_argument("file_mission: unknown drone");
    const Curve& c = ps_->curve();
    // The server's authorization statement: a synthetic route inside the
    // mission fence, committed under a fresh blinding. Only the server holds
    // the opening.
    const snark::Geofence& f = st_user.fence;
    snark::FlightPath auth_path;
    for (int i = 0; i < 5; ++i) {
        uint16_t x = static_cast<uint16_t>(f.x_min + rng.below(uint64_t(f.x_max - f.x_min) + 1));
        uint16_t y = static_cast<uint16_t>(f.y_min + rng.below(uint64_t(f.y_max - f.y_min) + 1));
        auth_path.points.push_back({x, y});
    }
    ec::Scalar r_s = c.random_nonzero_scalar(rng);
    Mission m;
    m.rid = rid;
    m.did = did;
    m.st_user = st_user;
    m.st_drone = st_drone;
    m.st_server = ps_->make_statement(auth_path, f, r_s, static_kp_.pub);
    m.backend = backend;
    missions_.push_back(std::move(m));
    size_t idx = missions_.size() - 1;
    mission_by_pair_[{rid, did}] = idx;
    server_openings_.emplace(idx, snark::PedersenOpening{r_s, auth_path});
    return idx;
}

ServerCore::Session* ServerCore::find_by(const std::map<Id16, Id16>& index, const Id16& key) {
    auto it = index.find(key);
    if (it == index.end()) return nullptr;
    auto sit = sessions_.find(it->second);
    return sit == sessions_.end() ? nullptr : &sit->second;
}

bool ServerCore::register_nonce(const std::array<uint8_t, 32>& n) {
    bool fresh = nonces_.insert(n).second;
    if (!fresh) nonce_repeat_ = true;
    return fresh;
}

void ServerCore::fail_session(Session& s, Reject r) {
    s.phase = Phase::Failed;
    s.reason = r;
    s.k_su = Digest32{};
    s.k_sd = Digest32{};
    s.chain = Digest32{};
}

Result<std::pair<wire::Msg3, wire::Msg4>> ServerCore::process_init(const wire::Msg1& m1,
                                                                   uint32_t ts1,
                                                                   const wire::Msg2& m2,
                                                                   uint32_t ts2, uint32_t now,
                                                                   Rng& rng) {
    using Out = std::pair<wire::Msg3, wire::Msg4>;
    auto uit = users_.find(m1.rid);
    if (uit == users_.end()) return Result<Out>::fail(Reject::UnknownPeer);
    auto dit = drones_.find(m2.did);
    if (dit == drones_.end()) return Result<Out>::fail(Reject::UnknownPeer);

    if (!check_freshness(ts1, now, window_ms_) || !check_freshness(ts2, now, window_ms_)) {
        return Result<Out>::fail(Reject::Stale);
    }
    // Identity binders; Msg1 has no token, the binder doubles as its MAC.
    if (!ct_equal(identity_binder(uit->second.binder, m1.e_u, m1.rid), m1.i_u)) {
        return Result<Out>::fail(Reject::AuthFail);
    }
    if (!ct_equal(identity_binder(dit->second.binder, m2.e_d, m2.did), m2.i_d)) {
        return Result<Out>::fail(Reject::AuthFail);
    }
    if (!check_token(dit->second.smk, MsgType::M2, zeroed(m2), ts2, m2.auth)) {
        return Result<Out>::fail(Reject::AuthFail);
    }
    const Curve& c = ps_->curve();
    if (!c.decode_x(m1.e_u.data()) || !c.decode_x(m2.e_d.data())) {
        return Result<Out>::fail(Reject::Malformed);
    }
    auto mit = mission_by_pair_.find({m1.rid, m2.did});
    if (mit == mission_by_pair_.end()) return Result<Out>::fail(Reject::UnknownPeer);

    // One live session per user alias. A handshake stalled for longer than
    // the freshness window can never finish (all its frames are stale by
    // now), so it is evicted rather than blocking the alias forever.
    if (Session* live = find_by(sid_by_rid_, m1.rid)) {
        if (live->phase != Phase::Confirmed && live->phase != Phase::Failed) {
            if (now >= live->created_ms && now - live->created_ms < window_ms_) {
                return Result<Out>::fail(Reject::WrongPhase);
            }
            fail_session(*live, Reject::Stale);
        }
    }
    if (!register_nonce(m1.e_u)) return Result<Out>::fail(Reject::Replay);
    if (!register_nonce(m2.e_d)) return Result<Out>::fail(Reject::Replay);

    Session s;
    s.mission = mit->second;
    s.rid = m1.rid;
    s.did = m2.did;
    s.e_u = m1.e_u;
    s.e_d = m2.e_d;
    s.sid = session_id(s.e_u, s.e_d);
    s.uid = session_uid(s.rid, s.sid);
    s.k_su = leg_key("ZAPS-ksu", uit->second.smk, s.e_u, s.e_d, s.sid);
    s.k_sd = leg_key("ZAPS-ksd", dit->second.smk, s.e_u, s.e_d, s.sid);
    s.chain = chain_absorb(chain_init(), wire::encode(m1));

    wire::Msg3 m3;
    m3.sid = s.sid;
    m3.uid = s.uid;
    m3.e_d = s.e_d;
    m3.auth = make_token(s.k_su, MsgType::M3, zeroed(m3), now);
    wire::Msg4 m4;
    m4.sid = s.sid;
    m4.did = s.did;
    m4.e_u = s.e_u;
    m4.auth = make_token(s.k_sd, MsgType::M4, zeroed(m4), now);

    s.chain = chain_absorb(s.chain, wire::encode(m3));
    s.phase = Phase::Authenticated;
    s.created_ms = now;
    Id16 sid = s.sid;
    sessions_[sid] = std::move(s);
    sid_by_rid_[m1.rid] = sid;
    sid_by_uid_[sessions_[sid].uid] = sid;
    sid_by_did_[m2.did] = sid;
    (void)rng;
    return Result<Out>::success({m3, m4});
}

Result<wire::Msg6> ServerCore::process_proof(const wire::Msg5& m5, uint32_t frame_ts,
                                             uint32_t now, Rng& rng) {
    Session* s = find_by(sid_by_rid_, m5.rid);
    if (!s) return Result<wire::Msg6>::fail(Reject::UnknownPeer);
    if (s->phase != Phase::Authenticated) return Result<wire::Msg6>::fail(Reject::WrongPhase);

    // T1 freshness (payload timestamp) and transport freshness.
    if (!check_freshness(m5.t1, now, window_ms_) || !check_freshness(frame_ts, now, window_ms_)) {
        fail_session(*s, Reject::Stale);
        return Result<wire::Msg6>::fail(Reject::Stale);
    }
    const Mission& mission = missions_[s->mission];
    const Curve& c = ps_->curve();
    if (m5.p_u != c.encode_x(mission.st_user.commitment.point)) {
        fail_session(*s, Reject::UnknownStatement);
        return Result<wire::Msg6>::fail(Reject::UnknownStatement);
    }
    if (!register_nonce(m5.i_u)) {
        fail_session(*s, Reject::Replay);
        return Result<wire::Msg6>::fail(Reject::Replay);
    }
    // Proof before MAC: a broken envelope reports as proof-reject.
    ProofEnvelope env{m5.proof};
    if (!ps_->verify(mission.backend, mission.st_user, env)) {
        fail_session(*s, Reject::ProofReject);
        return Result<wire::Msg6>::fail(Reject::ProofReject);
    }
    if (!check_token(s->k_su, MsgType::M5, zeroed(m5), frame_ts, m5.auth)) {
        fail_session(*s, Reject::AuthFail);
        return Result<wire::Msg6>::fail(Reject::AuthFail);
    }

    s->chain = chain_absorb(s->chain, wire::encode(m5));
    s->t1 = m5.t1;
    s->i5_u = m5.i_u;

    ProofEnvelope pi_s = ps_->prove(mission.backend, mission.st_server,
                                    server_openings_.at(s->mission), rng);
    wire::Msg6 m6;
    m6.p_s = c.encode_x(mission.st_server.commitment.point);
    Bytes ibuf;
    append(ibuf, std::string_view("ZAPS-i6"));
    append(ibuf, s->sid);
    append(ibuf, m5.p_u);
    append(ibuf, envelope_digest(m5.proof));
    append(ibuf, s->i5_u);
    m6.i_s = sha256(ibuf);
    m6.proof = pi_s.bytes;
    m6.auth = make_token(s->k_sd, MsgType::M6, zeroed(m6), now);
    s->phase = Phase::ProofSent;
    return Result<wire::Msg6>::success(m6);
}

Result<Unit> ServerCore::relay_msg7(const wire::Msg7& m7) {
    Session* s = find_by(sid_by_did_, m7.did);
    if (!s) return Result<Unit>::fail(Reject::UnknownPeer);
    if (s->phase != Phase::ProofSent) return Result<Unit>::fail(Reject::WrongPhase);
    s->chain = chain_absorb(s->chain, wire::encode(m7));
    return Result<Unit>::success(Unit{});
}

Result<Unit> ServerCore::process_final(const wire::Msg8& m8, uint32_t frame_ts, uint32_t now) {
    Session* s = find_by(sid_by_uid_, m8.uid);
    if (!s) return Result<Unit>::fail(Reject::UnknownPeer);
    if (s->phase != Phase::ProofSent) return Result<Unit>::fail(Reject::WrongPhase);
    if (!check_freshness(frame_ts, now, window_ms_)) {
        fail_session(*s, Reject::Stale);
        return Result<Unit>::fail(Reject::Stale);
    }
    if (!check_token(s->k_su, MsgType::M8, zeroed(m8), frame_ts, m8.auth)) {
        fail_session(*s, Reject::AuthFail);
        return Result<Unit>::fail(Reject::AuthFail);
    }
    if (!ct_equal(final_binder(s->sid, s->chain), m8.i_us)) {
        fail_session(*s, Reject::TranscriptMismatch);
        return Result<Unit>::fail(Reject::TranscriptMismatch);
    }
    s->phase = Phase::Confirmed;
    return Result<Unit>::success(Unit{});
}

std::optional<ServerCore::SessionView> ServerCore::session_by_rid(const Id16& rid) const {
    auto it = sid_by_rid_.find(rid);
    if (it == sid_by_rid_.end()) return std::nullopt;
    auto sit = sessions_.find(it->second);
    if (sit == sessions_.end()) return std::nullopt;
    return SessionView{sit->second.phase, sit->second.reason, sit->second.sid, sit->second.uid};
}

// ---- user agent ------------------------------------------------------------

UserAgent::UserAgent(std::shared_ptr<snark::ProofSystem> ps, Config cfg)
    : ps_(std::move(ps)), cfg_(std::move(cfg)), r1_(ps_->curve().scalar_u64(0)) {}

template <typename T>
Result<T> UserAgent::fail(Reject r) {
    phase_ = Phase::Failed;
    reason_ = r;
    k_su_ = Digest32{};
    sk_ = kex::SessionKey{};
    chain_ = Digest32{};
    r1_.v = 0;
    return Result<T>::fail(r);
}

Result<wire::Msg1> UserAgent::begin(uint32_t now, Rng& rng) {
    if (phase_ != Phase::Registered) return Result<wire::Msg1>::fail(Reject::WrongPhase);
    const Curve& c = ps_->curve();
    KeyPair eph = kex::gen_keypair(c, rng);
    r1_ = eph.secret;
    e_u_ = c.encode_x(eph.pub);

    wire::Msg1 m;
    m.e_u = e_u_;
    m.rid = cfg_.reg.alias;
    m.i_u = identity_binder(cfg_.reg.binder, e_u_, cfg_.reg.alias);
    chain_ = chain_absorb(chain_init(), wire::encode(m));
    phase_ = Phase::InitSent;
    last_ts_ = now;
    return Result<wire::Msg1>::success(m);
}

Result<Unit> UserAgent::on_msg3(const wire::Msg3& m, uint32_t frame_ts, uint32_t now) {
    if (phase_ != Phase::InitSent) return Result<Unit>::fail(Reject::WrongPhase);
    if (!check_freshness(frame_ts, now, cfg_.window_ms)) return fail<Unit>(Reject::Stale);

    k_su_ = leg_key("ZAPS-ksu", cfg_.reg.smk, e_u_, m.e_d, m.sid);
    if (!check_token(k_su_, MsgType::M3, zeroed(m), frame_ts, m.auth)) {
        return fail<Unit>(Reject::AuthFail);
    }
    if (m.uid != session_uid(cfg_.reg.alias, m.sid)) return fail<Unit>(Reject::AuthFail);
    const Curve& c = ps_->curve();
    auto e_d = c.decode_x(m.e_d.data());
    if (!e_d) return fail<Unit>(Reject::Malformed);

    sid_ = m.sid;
    uid_ = m.uid;
    e_d_ = m.e_d;
    sk_ = kex::derive_session_key(
        c, r1_, *e_d, sk_transcript(e_u_, e_d_, c.encode_x(cfg_.server_pub)));
    chain_ = chain_absorb(chain_, wire::encode(m));
    phase_ = Phase::Authenticated;
    last_ts_ = now;
    return Result<Unit>::success(Unit{});
}

Result<wire::Msg5> UserAgent::prove_path(uint32_t now, Rng& rng) {
    if (phase_ != Phase::Authenticated) return Result<wire::Msg5>::fail(Reject::WrongPhase);
    const Curve& c = ps_->curve();

    wire::Msg5 m;
    m.p_u = c.encode_x(cfg_.st_user.commitment.point);
    m.rid = cfg_.reg.alias;
    // Opaque freshening blob: binds the registration binder and the running
    // transcript under a throwaway nonce. The server stores it, never opens it.
    Digest32 r4 = rng.digest32();
    Bytes ibuf;
    append(ibuf, std::string_view("ZAPS-i5"));
    append(ibuf, cfg_.reg.binder);
    append(ibuf, chain_);
    append(ibuf, r4);
    m.i_u = sha256(ibuf);

    try {
        snark::ProofEnvelope env = ps_->prove(
            cfg_.backend, cfg_.st_user, snark::PedersenOpening{cfg_.blinding, cfg_.path}, rng);
        m.proof = env.bytes;
    } catch (const snark::WitnessInvalid&) {
        return fail<wire::Msg5>(Reject::WitnessInvalid);
    }
    m.t1 = now;
    m.auth = make_token(k_su_, MsgType::M5, zeroed(m), now);
    chain_ = chain_absorb(chain_, wire::encode(m));
    phase_ = Phase::ProofSent;
    last_ts_ = now;
    return Result<wire::Msg5>::success(m);
}

Result<wire::Msg8> UserAgent::on_msg7(const wire::Msg7& m, const Bytes& aux, uint32_t frame_ts,
                                      uint32_t now) {
    if (phase_ != Phase::ProofSent) return Result<wire::Msg8>::fail(Reject::WrongPhase);
    if (!check_freshness(frame_ts, now, cfg_.window_ms)) return fail<wire::Msg8>(Reject::Stale);

    const Curve& c = ps_->curve();
    if (m.p_d != c.encode_x(cfg_.st_drone.commitment.point)) {
        return fail<wire::Msg8>(Reject::UnknownStatement);
    }
    if (!ps_->verify(cfg_.backend, cfg_.st_drone, snark::ProofEnvelope{m.proof})) {
        return fail<wire::Msg8>(Reject::ProofReject);
    }
    // The forwarded server proof rides in the frame aux.
    if (aux.size() != 128) return fail<wire::Msg8>(Reject::ProofReject);
    snark::ProofEnvelope pi_s;
    std::memcpy(pi_s.bytes.data(), aux.data(), 128);
    if (!ps_->verify(cfg_.backend, cfg_.st_server, pi_s)) {
        return fail<wire::Msg8>(Reject::ProofReject);
    }
    if (!check_token(sk_.key, MsgType::M7, zeroed(m), frame_ts, m.auth)) {
        return fail<wire::Msg8>(Reject::AuthFail);
    }

    chain_ = chain_absorb(chain_, wire::encode(m));
    wire::Msg8 out;
    out.uid = uid_;
    out.i_us = final_binder(sid_, chain_);
    out.auth = make_token(k_su_, MsgType::M8, zeroed(out), now);
    phase_ = Phase::Confirmed;
    last_ts_ = now;
    return Result<wire::Msg8>::success(out);
}

// ---- drone agent -----------------------------------------------------------

DroneAgent::DroneAgent(std::shared_ptr<snark::ProofSystem> ps, Config cfg)
    : ps_(std::move(ps)), cfg_(std::move(cfg)), r2_(ps_->curve().scalar_u64(0)) {}

template <typename T>
Result<T> DroneAgent::fail(Reject r) {
    phase_ = Phase::Failed;
    reason_ = r;
    k_sd_ = Digest32{};
    sk_ = kex::SessionKey{};
    r2_.v = 0;
    return Result<T>::fail(r);
}

Result<wire::Msg2> DroneAgent::begin(uint32_t now, Rng& rng) {
    if (phase_ != Phase::Registered) return Result<wire::Msg2>::fail(Reject::WrongPhase);
    const Curve& c = ps_->curve();
    KeyPair eph = kex::gen_keypair(c, rng);
    r2_ = eph.secret;
    e_d_ = c.encode_x(eph.pub);

    wire::Msg2 m;
    m.e_d = e_d_;
    m.did = cfg_.reg.alias;
    m.i_d = identity_binder(cfg_.reg.binder, e_d_, cfg_.reg.alias);
    m.auth = make_token(cfg_.reg.smk, MsgType::M2, zeroed(m), now);
    phase_ = Phase::InitSent;
    last_ts_ = now;
    return Result<wire::Msg2>::success(m);
}

Result<Unit> DroneAgent::on_msg4(const wire::Msg4& m, uint32_t frame_ts, uint32_t now) {
    if (phase_ != Phase::InitSent) return Result<Unit>::fail(Reject::WrongPhase);
    if (!check_freshness(frame_ts, now, cfg_.window_ms)) return fail<Unit>(Reject::Stale);

    k_sd_ = leg_key("ZAPS-ksd", cfg_.reg.smk, m.e_u, e_d_, m.sid);
    if (!check_token(k_sd_, MsgType::M4, zeroed(m), frame_ts, m.auth)) {
        return fail<Unit>(Reject::AuthFail);
    }
    if (m.did != cfg_.reg.alias) return fail<Unit>(Reject::AuthFail);
    const Curve& c = ps_->curve();
    auto e_u = c.decode_x(m.e_u.data());
    if (!e_u) return fail<Unit>(Reject::Malformed);

    sid_ = m.sid;
    e_u_ = m.e_u;
    sk_ = kex::derive_session_key(
        c, r2_, *e_u, sk_transcript(e_u_, e_d_, c.encode_x(cfg_.server_pub)));
    phase_ = Phase::Authenticated;
    last_ts_ = now;
    return Result<Unit>::success(Unit{});
}

Result<DroneAgent::Msg7Out> DroneAgent::on_msg6(const wire::Msg6& m, uint32_t frame_ts,
                                                uint32_t now, Rng& rng) {
    if (phase_ != Phase::Authenticated) return Result<Msg7Out>::fail(Reject::WrongPhase);
    if (!check_freshness(frame_ts, now, cfg_.window_ms)) return fail<Msg7Out>(Reject::Stale);

    const Curve& c = ps_->curve();
    if (m.p_s != c.encode_x(cfg_.st_server.commitment.point)) {
        return fail<Msg7Out>(Reject::UnknownStatement);
    }
    if (!ps_->verify(cfg_.backend, cfg_.st_server, snark::ProofEnvelope{m.proof})) {
        return fail<Msg7Out>(Reject::ProofReject);
    }
    if (!check_token(k_sd_, MsgType::M6, zeroed(m), frame_ts, m.auth)) {
        return fail<Msg7Out>(Reject::AuthFail);
    }

    Msg7Out out;
    out.msg.p_d = c.encode_x(cfg_.st_drone.commitment.point);
    out.msg.did = cfg_.reg.alias;
    Digest32 r5 = rng.digest32();
    Bytes ibuf;
    append(ibuf, std::string_view("ZAPS-i7"));
    append(ibuf, cfg_.reg.binder);
    append(ibuf, e_d_);
    append(ibuf, r5);
    out.msg.i_d = sha256(ibuf);
    try {
        snark::ProofEnvelope env = ps_->prove(
            cfg_.backend, cfg_.st_drone, snark::PedersenOpening{cfg_.blinding, cfg_.path}, rng);
        out.msg.proof = env.bytes;
    } catch (const snark::WitnessInvalid&) {
        return fail<Msg7Out>(Reject::WitnessInvalid);
    }
    out.msg.auth = make_token(sk_.key, MsgType::M7, zeroed(out.msg), now);
    out.aux.assign(m.proof.begin(), m.proof.end());
    phase_ = Phase::Confirmed;
    last_ts_ = now;
    return Result<Msg7Out>::success(std::move(out));
}

// ---- cross-entity helpers --------------------------------------------------

Result<Unit> finalize_session_keys(UserAgent& user, DroneAgent& drone, uint32_t now) {
    if (user.phase() != Phase::Authenticated || drone.phase() != Phase::Authenticated) {
        return Result<Unit>::fail(Reject::WrongPhase);
    }
    // Either leg gone stale aborts the pairing.
    uint32_t w = kDefaultWindowMs;
    if (!check_freshness(user.last_ts(), now, w) || !check_freshness(drone.last_ts(), now, w)) {
        return Result<Unit>::fail(Reject::Stale);
    }
    const kex::SessionKey& a = user.sk();
    const kex::SessionKey& b = drone.sk();
    if (a.key != b.key || a.tag != b.tag || !(a.point == b.point)) {
        return Result<Unit>::fail(Reject::KeyConfirmFail);
    }
    return Result<Unit>::success(Unit{});
}

// ---- deployment and the direct runner --------------------------------------

Deployment make_deployment(const DeploymentParams& params) {
    const Curve& curve = ec::curve_by_id(params.curve);
    Rng root(params.seed);
    Rng setup_rng = root.child("setup");
    auto ps = std::make_shared<snark::ProofSystem>(curve, setup_rng.u64());
    Rng server_rng = root.child("server");
    auto server = std::make_shared<ServerCore>(ps, server_rng, params.window_ms);

    Rng user_rng = root.child("user-lt");
    Rng drone_rng = root.child("drone-lt");
    KeyPair user_lt = kex::gen_keypair(curve, user_rng);
    KeyPair drone_lt = kex::gen_keypair(curve, drone_rng);

    Registration reg_u = server->register_user("user-1", "correct-horse", user_lt.pub);
    Registration reg_d = server->register_drone("drone-1", drone_lt.pub);

    // Mission route: shared by user and drone, committed independently.
    snark::Geofence fence{1000, 3000, 1000, 3000};
    Rng route_rng = root.child("route");
    snark::FlightPath path;
    for (size_t i = 0; i < params.n_waypoints; ++i) {
        path.points.push_back(
            {static_cast<uint16_t>(1000 + route_rng.below(2001)),
             static_cast<uint16_t>(1000 + route_rng.below(2001))});
    }
    ec::Scalar r_u = curve.random_nonzero_scalar(route_rng);
    ec::Scalar r_d = curve.random_nonzero_scalar(route_rng);
    snark::Statement st_user = ps->make_statement(path, fence, r_u, user_lt.pub);
    snark::Statement st_drone = ps->make_statement(path, fence, r_d, drone_lt.pub);

    Rng mission_rng = root.child("mission");
    size_t mission = server->file_mission(reg_u.alias, reg_d.alias, st_user, st_drone,
                                          params.backend, mission_rng);
    const snark::Statement& st_server = server->mission(mission).st_server;

    Deployment dep;
    dep.ps = ps;
    dep.server = server;
    dep.mission = mission;
    dep.user_cfg = UserAgent::Config{"user-1",  "correct-horse", user_lt,  reg_u,
                                     server->static_pub(), path,     r_u,    st_user,
                                     st_server, st_drone,   params.backend, params.window_ms};
    dep.drone_cfg = DroneAgent::Config{"drone-1", drone_lt, reg_d,    server->static_pub(),
                                       path,      r_d,      st_user,  st_server,
                                       st_drone,  params.backend, params.window_ms};
    return dep;
}

SessionTrace run_direct_session(Deployment& dep, uint64_t session_seed, uint32_t start_ms,
                                uint32_t hop_ms) {
    SessionTrace trace;
    Rng rng(session_seed);
    Rng user_rng = rng.child("user");
    Rng drone_rng = rng.child("drone");
    Rng server_rng = rng.child("srv");

    UserAgent user(dep.ps, dep.user_cfg);
    DroneAgent drone(dep.ps, dep.drone_cfg);
    ServerCore& server = *dep.server;

    auto push = [&trace](uint8_t tag, uint32_t ts, const Bytes& payload, Bytes aux = {}) {
        wire::Frame f;
        f.tag = tag;
        f.sender_ts = ts;
        f.aux = std::move(aux);
        f.payload = payload;
        trace.frames.push_back(std::move(f));
        trace.overhead.add_message(static_cast<wire::MsgType>(tag), payload.size());
    };
    auto finish = [&](Reject r) {
        trace.failure = r;
        trace.user_phase = user.phase();
        trace.drone_phase = drone.phase();
        trace.server_phase = Phase::Failed;
        return trace;
    };

    uint32_t t = start_ms;
    auto m1 = user.begin(t, user_rng);
    if (!m1.ok()) return finish(m1.reason);
    push(1, t, wire::encode(*m1.value));
    uint32_t ts1 = t;

    t += hop_ms;
    auto m2 = drone.begin(t, drone_rng);
    if (!m2.ok()) return finish(m2.reason);
    push(2, t, wire::encode(*m2.value));
    uint32_t ts2 = t;

    t += hop_ms;
    auto pair34 = server.process_init(*m1.value, ts1, *m2.value, ts2, t, server_rng);
    if (!pair34.ok()) return finish(pair34.reason);
    push(3, t, wire::encode(pair34.value->first));
    push(4, t, wire::encode(pair34.value->second));
    uint32_t ts34 = t;

    t += hop_ms;
    auto u3 = user.on_msg3(pair34.value->first, ts34, t);
    if (!u3.ok()) return finish(u3.reason);
    auto d4 = drone.on_msg4(pair34.value->second, ts34, t);
    if (!d4.ok()) return finish(d4.reason);
    auto fin = finalize_session_keys(user, drone, t);
    if (!fin.ok()) return finish(fin.reason);

    t += hop_ms;
    auto m5 = user.prove_path(t, user_rng);
    if (!m5.ok()) return finish(m5.reason);
    push(5, t, wire::encode(*m5.value));
    uint32_t ts5 = t;

    t += hop_ms;
    auto m6 = server.process_proof(*m5.value, ts5, t, server_rng);
    if (!m6.ok()) return finish(m6.reason);
    push(6, t, wire::encode(*m6.value));
    uint32_t ts6 = t;

    t += hop_ms;
    auto m7 = drone.on_msg6(*m6.value, ts6, t, drone_rng);
    if (!m7.ok()) return finish(m7.reason);
    push(7, t, wire::encode(m7.value->msg), m7.value->aux);
    uint32_t ts7 = t;

    t += hop_ms;  // drone -> server leg of the relay
    auto relay = server.relay_msg7(m7.value->msg);
    if (!relay.ok()) return finish(relay.reason);

    t += hop_ms;  // server -> user leg
    auto m8 = user.on_msg7(m7.value->msg, m7.value->aux, ts7, t);
    if (!m8.ok()) return finish(m8.reason);
    push(8, t, wire::encode(*m8.value));
    uint32_t ts8 = t;

    t += hop_ms;
    auto done = server.process_final(*m8.value, ts8, t);
    if (!done.ok()) return finish(done.reason);

    trace.user_phase = user.phase();
    trace.drone_phase = drone.phase();
    trace.server_phase = Phase::Confirmed;
    trace.user_sk = user.sk();
    trace.drone_sk = drone.sk();
    trace.end_ms = t;
    return trace;
}

}  // namespace zaps::proto
