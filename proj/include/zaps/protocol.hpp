#pragma once

#include <memory>
#include <set>

#include "zaps/backend.hpp"
#include "zaps/kex.hpp"
#include "zaps/wire.hpp"

namespace zaps::proto {

using ec::Curve;
using ec::CurvePoint;
using kex::KeyPair;

// Freshness window, simulated milliseconds. A message is fresh iff the
// absolute clock difference is strictly below the window.
inline constexpr uint32_t kDefaultWindowMs = 2000;

bool check_freshness(uint32_t t_msg, uint32_t t_now, uint32_t window_ms);

enum class Phase : uint8_t {
    Idle = 0,
    Registered,
    InitSent,
    Authenticated,
    ProofSent,
    Confirmed,
    Failed,
};
const char* phase_name(Phase p);

// Typed rejection reasons. Reporting buckets Stale/Replay/WrongPhase under
// "replay-reject" (duplicate or out-of-window delivery), AuthFail under
// "auth-failure" and ProofReject under "proof-reject".
enum class Reject : uint8_t {
    None = 0,
    Malformed,        // undecodable field or wrong layout
    UnknownPeer,      // alias not registered / no mission
    WrongPhase,       // operation not legal in the current phase
    Stale,            // timestamp outside the freshness window
    Replay,           // nonce seen before (append-only registry)
    AuthFail,         // MAC or identity binder mismatch
    ProofReject,      // zk envelope rejected
    WitnessInvalid,   // prover-side refusal: witness does not satisfy the circuit
    UnknownStatement, // commitment does not match the filed statement
    TranscriptMismatch,
    KeyConfirmFail,   // endpoint session keys disagree
};
const char* reject_name(Reject r);
// Coarse bucket used by attack reporting.
const char* reject_bucket(Reject r);

template <typename T>
struct Result {
    std::optional<T> value;
    Reject reason = Reject::None;

    bool ok() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    static Result success(T v) { return Result{std::move(v), Reject::None}; }
    static Result fail(Reject r) { return Result{std::nullopt, r}; }
};
struct Unit {
    bool operator==(const Unit&) const = default;
};

// ---- token and digest recipes ---------------------------------------------

// 64-byte auth token: mac = H(domain || key || tag || payload-with-token-
// zeroed || ts), kc = H(domain2 || key || mac). The key-confirmation half
// proves the sender holds the key beyond the single MAC image; both halves
// are receiver-recomputable.
wire::AuthToken make_token(const Digest32& key, wire::MsgType tag, const Bytes& payload_zeroed,
                           uint32_t ts);
bool check_token(const Digest32& key, wire::MsgType tag, const Bytes& payload_zeroed,
                 uint32_t ts, const wire::AuthToken& token);

// Static key shared between an enrolled entity and the server:
// H("ZAPS-smk" || x(secret * peer_pub)).
Digest32 static_key(const Curve& curve, const ec::Scalar& secret, const CurvePoint& peer_pub);

// First 16 bytes of a digest, used for aliases.
Id16 alias16(const Digest32& d);

// Running hash over the user-visible payload sequence (Msg1, 3, 5, 7). The
// user and the server maintain identical chains; the final ack binds it.
Digest32 chain_init();
Digest32 chain_absorb(const Digest32& prev, const Bytes& payload);

// ---- registration ---------------------------------------------------------

// What an enrolled entity walks away with: its pseudonymous alias, the
// identity binder the server stores a copy of, and the static server key.
struct Registration {
    Id16 alias{};
    Digest32 binder{};
    Digest32 smk{};
};

// A filed mission: who flies for whom, and the three public statements
// (route commitment of the user, of the drone, and the server's own
// authorization statement). Statements are public; openings are not.
struct Mission {
    Id16 rid{}, did{};
    snark::Statement st_user, st_server, st_drone;
    snark::Backend backend = snark::Backend::Schnorr;
};

// ---- server ---------------------------------------------------------------

class ServerCore {
public:
    ServerCore(std::shared_ptr<snark::ProofSystem> ps, Rng& rng,
               uint32_t window_ms = kDefaultWindowMs);

    const CurvePoint& static_pub() const { return static_kp_.pub; }
    uint32_t window_ms() const { return window_ms_; }

    // Enrollment. Throws std::invalid_argument on duplicates.
    Registration register_user(const std::string& id, const std::string& pwd,
                               const CurvePoint& user_pub);
    Registration register_drone(const std::string& id, const CurvePoint& drone_pub);

    // Files the two endpoint statements and generates the server's own
    // authorization statement (committing to a synthetic route inside the
    // same fence). Returns the mission index.
    size_t file_mission(const Id16& rid, const Id16& did, const snark::Statement& st_user,
                        const snark::Statement& st_drone, snark::Backend backend, Rng& rng);
    const Mission& mission(size_t idx) const { return missions_.at(idx); }
    size_t mission_count() const { return missions_.size(); }

    // Pairs the two hellos of one session: validates identity binders and the
    // drone token, derives the per-leg keys, emits both relays.
    Result<std::pair<wire::Msg3, wire::Msg4>> process_init(const wire::Msg1& m1, uint32_t ts1,
                                                           const wire::Msg2& m2, uint32_t ts2,
                                                           uint32_t now, Rng& rng);

    // Proof phase: freshness, then the route proof against the filed
    // statement, then the MAC; emits the countersigned Msg6 with the
    // server's own proof.
    Result<wire::Msg6> process_proof(const wire::Msg5& m5, uint32_t frame_ts, uint32_t now,
                                     Rng& rng);

    // The drone's Msg7 transits the server on its way to the user; the
    // server absorbs the payload into the session chain while relaying.
    Result<Unit> relay_msg7(const wire::Msg7& m7);

    // Final ack: closes the session when the user's transcript chain matches.
    Result<Unit> process_final(const wire::Msg8& m8, uint32_t frame_ts, uint32_t now);

    // Introspection.
    struct SessionView {
        Phase phase = Phase::Idle;
        Reject reason = Reject::None;
        Id16 sid{}, uid{};
    };
    std::optional<SessionView> session_by_rid(const Id16& rid) const;
    size_t nonce_count() const { return nonces_.size(); }
    // Cross-session uniqueness assertion for ephemerals: true while no nonce
    // has ever recurred.
    bool nonces_unique() const { return !nonce_repeat_; }

private:
    struct EntityRec {
        CurvePoint pub;
        Digest32 binder{};
        Digest32 smk{};
    };
    struct Session {
        Phase phase = Phase::Idle;
        Reject reason = Reject::None;
        size_t mission = 0;
        Id16 sid{}, uid{}, rid{}, did{};
        wire::X32 e_u{}, e_d{};
        Digest32 k_su{}, k_sd{};
        Digest32 chain{};
        Digest32 i5_u{};
        uint32_t t1 = 0;
        uint32_t created_ms = 0;
    };

    Session* find_by(const std::map<Id16, Id16>& index, const Id16& key);
    bool register_nonce(const std::array<uint8_t, 32>& n);
    void fail_session(Session& s, Reject r);

    std::shared_ptr<snark::ProofSystem> ps_;
    KeyPair static_kp_;
    uint32_t window_ms_;
    std::map<Id16, EntityRec> users_, drones_;
    std::vector<Mission> missions_;
    std::map<std::pair<Id16, Id16>, size_t> mission_by_pair_;
    std::map<size_t, snark::PedersenOpening> server_openings_;
    std::map<Id16, Session> sessions_;  // by SID
    std::map<Id16, Id16> sid_by_rid_, sid_by_uid_, sid_by_did_;
    std::set<std::array<uint8_t, 32>> nonces_;
    bool nonce_repeat_ = false;
};

// ---- endpoint agents ------------------------------------------------------

// One agent instance runs one session; re-running requires a fresh instance
// (ephemerals are single-use by construction).
class UserAgent {
public:
    struct Config {
        std::string id, pwd;
        KeyPair longterm;
        Registration reg;
        CurvePoint server_pub;
        snark::FlightPath path;
        ec::Scalar blinding;  // commitment blinding from mission filing
        snark::Statement st_user, st_server, st_drone;
        snark::Backend backend = snark::Backend::Schnorr;
        uint32_t window_ms = kDefaultWindowMs;
    };

    UserAgent(std::shared_ptr<snark::ProofSystem> ps, Config cfg);

    Result<wire::Msg1> begin(uint32_t now, Rng& rng);
    Result<Unit> on_msg3(const wire::Msg3& m, uint32_t frame_ts, uint32_t now);
    Result<wire::Msg5> prove_path(uint32_t now, Rng& rng);
    // aux carries the forwarded server proof envelope (128 bytes).
    Result<wire::Msg8> on_msg7(const wire::Msg7& m, const Bytes& aux, uint32_t frame_ts,
                               uint32_t now);

    Phase phase() const { return phase_; }
    Reject last_reject() const { return reason_; }
    const kex::SessionKey& sk() const { return sk_; }
    const Id16& sid() const { return sid_; }
    const Id16& uid() const { return uid_; }
    uint32_t last_ts() const { return last_ts_; }

private:
    template <typename T>
    Result<T> fail(Reject r);

    std::shared_ptr<snark::ProofSystem> ps_;
    Config cfg_;
    Phase phase_ = Phase::Registered;
    Reject reason_ = Reject::None;
    ec::Scalar r1_;
    wire::X32 e_u_{}, e_d_{};
    Id16 sid_{}, uid_{};
    Digest32 k_su_{};
    kex::SessionKey sk_{};
    Digest32 chain_{};
    uint32_t last_ts_ = 0;
};

class DroneAgent {
public:
    struct Config {
        std::string id;
        KeyPair longterm;
        Registration reg;
        CurvePoint server_pub;
        snark::FlightPath path;
        ec::Scalar blinding;
        snark::Statement st_user, st_server, st_drone;
        snark::Backend backend = snark::Backend::Schnorr;
        uint32_t window_ms = kDefaultWindowMs;
    };

    struct Msg7Out {
        wire::Msg7 msg;
        Bytes aux;  // forwarded server proof for the user
    };

    DroneAgent(std::shared_ptr<snark::ProofSystem> ps, Config cfg);

    Result<wire::Msg2> begin(uint32_t now, Rng& rng);
    Result<Unit> on_msg4(const wire::Msg4& m, uint32_t frame_ts, uint32_t now);
    Result<Msg7Out> on_msg6(const wire::Msg6& m, uint32_t frame_ts, uint32_t now, Rng& rng);

    Phase phase() const { return phase_; }
    Reject last_reject() const { return reason_; }
    const kex::SessionKey& sk() const { return sk_; }
    const Id16& sid() const { return sid_; }
    uint32_t last_ts() const { return last_ts_; }

private:
    template <typename T>
    Result<T> fail(Reject r);

    std::shared_ptr<snark::ProofSystem> ps_;
    Config cfg_;
    Phase phase_ = Phase::Registered;
    Reject reason_ = Reject::None;
    ec::Scalar r2_;
    wire::X32 e_u_{}, e_d_{};
    Id16 sid_{};
    Digest32 k_sd_{};
    kex::SessionKey sk_{};
    uint32_t last_ts_ = 0;
};

// Cross-entity key agreement check after the initialization phase: both
// endpoints Authenticated, equal session keys and tags, both legs still
// inside the freshness window at `now`. On mismatch both sessions abort.
Result<Unit> finalize_session_keys(UserAgent& user, DroneAgent& drone, uint32_t now);

// ---- fixtures and the direct runner ---------------------------------------

// Everything needed to run sessions between one user, one drone and the
// server: enrolled agents configs, the filed mission, and the shared proof
// system. Built deterministically from a seed.
struct Deployment {
    std::shared_ptr<snark::ProofSystem> ps;
    std::shared_ptr<ServerCore> server;
    UserAgent::Config user_cfg;
    DroneAgent::Config drone_cfg;
    size_t mission = 0;
};

struct DeploymentParams {
    uint64_t seed = 1;
    snark::Backend backend = snark::Backend::Schnorr;
    size_t n_waypoints = 5;
    uint32_t window_ms = kDefaultWindowMs;
    ec::CurveId curve = ec::CurveId::Secp256k1;
};

Deployment make_deployment(const DeploymentParams& params);

// One honest end-to-end session driven directly (no network). Collects every
// frame in transit order plus the final phases. hop_ms is the simulated
// delay added per message leg.
struct SessionTrace {
    std::vector<wire::Frame> frames;  // eight entries, tags 1..8
    Phase user_phase = Phase::Idle;
    Phase drone_phase = Phase::Idle;
    Phase server_phase = Phase::Idle;
    Reject failure = Reject::None;
    kex::SessionKey user_sk, drone_sk;
    wire::OverheadReport overhead;
    uint32_t end_ms = 0;
};

SessionTrace run_direct_session(Deployment& dep, uint64_t session_seed, uint32_t start_ms = 0,
                                uint32_t hop_ms = 3);

}  // namespace zaps::proto
