#pragma once

#include "zaps/protocol.hpp"

namespace zaps::sim {

using proto::Deployment;
using proto::DeploymentParams;
using proto::Phase;
using proto::Reject;

// ---- adversary -------------------------------------------------------------

enum class AdversaryKind : uint8_t {
    None = 0,
    Replay,       // duplicate one captured message after a delay
    Mitm,         // substitute ephemerals with adversary-known ones (or record only)
    TamperBit,    // flip one bit of one message in transit
    Impersonate,  // forge a hello for a registered alias without its secrets
};

enum class Role : uint8_t { User = 0, Drone = 1 };

struct Adversary {
    AdversaryKind kind = AdversaryKind::None;
    uint8_t target_tag = 5;       // which message to replay / tamper
    uint32_t delay_ms = 3000;     // replay re-delivery delay
    uint32_t bit = 0;             // tamper bit position within the payload
    Role target_role = Role::User;  // whom to impersonate
    bool passive = false;         // Mitm: record only, deliver unmodified
};

// ---- configuration ---------------------------------------------------------

// Virtual processing costs in microseconds. The event clock charges these
// instead of wall time so a run is byte-reproducible; the defaults are in
// the measured order of magnitude of the crypto they stand for (see the
// bench command for live numbers on the host).
struct CostModel {
    uint32_t server_init_us = 2000;    // pairing the hellos, key derivation
    uint32_t server_verify_us = 3000;  // route-proof verification
    uint32_t server_prove_us = 2600;   // authorization proof generation
    uint32_t server_relay_us = 300;
    uint32_t server_final_us = 1100;
    uint32_t user_kex_us = 400;
    uint32_t user_prove_us = 2600;
    uint32_t user_final_us = 500;
    uint32_t drone_kex_us = 400;
    uint32_t drone_prove_us = 2600;
};

struct SimConfig {
    uint32_t uavs = 10;       // user/drone pairs sharing one authority
    uint64_t seed = 1;
    uint32_t sessions_per_uav = 4;
    uint32_t period_ms = 2000;   // spacing between a pair's sessions
    uint32_t window_ms = proto::kDefaultWindowMs;
    uint32_t delay_min_us = 5000;   // channel delay, bounded uniform
    uint32_t delay_max_us = 50000;
    double loss = 0.0;              // independent per-message drop probability
    snark::Backend backend = snark::Backend::Schnorr;
    std::vector<uint32_t> waypoint_mix{5, 8, 10, 15};  // cycled across pairs
    bool extended_mode = false;  // account per-waypoint proof extras
    bool record_events = false;  // keep the event list for JSON dumps
    Adversary adversary{};
    CostModel costs{};
};

// Throws std::invalid_argument when a field is out of range.
void validate_config(const SimConfig& cfg);

// ---- results ---------------------------------------------------------------

struct RecordedEvent {
    uint64_t t_us = 0;
    uint64_t seq = 0;
    std::string kind;  // deliver | drop | inject | job
    uint8_t tag = 0;
    uint32_t session = 0;
};

struct SwarmMetrics {
    uint32_t uavs = 0;
    uint32_t sessions = 0;
    uint32_t confirmed = 0;
    std::map<std::string, uint32_t> aborted;  // reject bucket -> count

    // Server-side handling per confirmed session: queueing wait plus virtual
    // processing, split into the proof step and everything else.
    double mean_handling_ms = 0;
    double mean_proof_ms = 0;
    double mean_session_ms = 0;

    uint64_t bytes_total = 0;   // protocol payload bytes (framing excluded)
    double bytes_per_uav = 0;

    // Channel conservation: emitted == delivered + dropped + intercepted.
    uint64_t emitted = 0, delivered = 0, dropped = 0, intercepted = 0;
    uint64_t injected = 0;         // adversary-originated deliveries
    uint64_t inject_rejected = 0;  // ... that the receiver refused
    uint64_t observed = 0;         // passively recorded copies
    uint32_t confirmed_with_known_key = 0;  // sessions confirmed on an
                                            // adversary-derivable key
    bool nonces_unique = true;
    uint64_t end_us = 0;
    std::string event_log_hash;  // SHA-256 over the ordered event stream
    std::vector<RecordedEvent> events;  // only when record_events
};

SwarmMetrics run_swarm(const SimConfig& cfg);

// One sweep point: same base config, overridden UAV count, and a session
// count that keeps the total number of measured sessions near
// total_sessions_target (so the mean handling time has comparable precision
// at every point).
SimConfig sweep_point(SimConfig base, uint32_t uavs, uint32_t total_sessions_target = 600);

std::string swarm_csv_header();
std::string swarm_csv_row(const SwarmMetrics& m, uint64_t seed);

// ---- recorded honest run for message-level attack experiments --------------

// Runs one honest session step by step, keeping a snapshot of every receiver
// immediately before each delivery. Attack trials then re-deliver a modified
// (or duplicated) message against the snapshot, so each trial is independent
// and cheap — no proofs are recomputed.
class HonestRun {
public:
    HonestRun(const DeploymentParams& params, uint64_t run_seed);

    bool confirmed() const { return confirmed_; }
    const Bytes& payload(size_t msg_idx) const { return payloads_.at(msg_idx - 1); }
    uint32_t sent_ts(size_t msg_idx) const { return sent_ts_.at(msg_idx - 1); }
    uint32_t end_ms() const { return end_ms_; }

    struct Outcome {
        bool rejected = false;
        Reject reason = Reject::None;
        std::string bucket;
    };

    // Delivers `payload` in place of message msg_idx (1..8) to a fresh copy
    // of the original receiver, at the original delivery time.
    Outcome deliver(size_t msg_idx, const Bytes& payload) const;
    // Control: the unmodified message is accepted.
    Outcome deliver_control(size_t msg_idx) const;
    // Re-delivers the original message to the post-session world after
    // delay_ms. Models a recorded-and-replayed frame (timestamps unchanged).
    Outcome replay(size_t msg_idx, uint32_t delay_ms) const;

private:
    Outcome dispatch(size_t msg_idx, const Bytes& payload, uint32_t frame_ts,
                     uint32_t now) const;

    Deployment dep_;
    // Receiver snapshots taken just before the numbered message arrived.
    std::optional<proto::ServerCore> srv_pre_init_, srv_pre5_, srv_pre7_, srv_pre8_, srv_post_;
    std::optional<proto::UserAgent> user_pre3_, user_pre7_, user_post_;
    std::optional<proto::DroneAgent> drone_pre4_, drone_pre6_, drone_post_;
    std::array<Bytes, 8> payloads_{};
    std::array<uint32_t, 8> sent_ts_{};
    std::array<uint32_t, 8> recv_now_{};
    Bytes aux7_;
    uint32_t ts2_ = 0;  // Msg2's own send time (init pair delivery)
    bool confirmed_ = false;
    uint32_t end_ms_ = 0;
};

// ---- exhaustive single-bit tamper sweep ------------------------------------

struct TamperSweep {
    uint64_t trials = 0;
    uint64_t rejected = 0;
    uint32_t controls = 0;          // zero-flip deliveries attempted
    uint32_t controls_accepted = 0;
    std::array<uint64_t, 8> per_msg_trials{};
    std::array<uint64_t, 8> per_msg_rejected{};
    std::map<std::string, uint64_t> buckets;        // all trials
    std::map<std::string, uint64_t> proof_buckets;  // flips inside proof fields
};

// Flips every bit of every message of one honest trace; each trial delivers
// the modified message to a snapshot of its original receiver.
TamperSweep run_tamper_sweep(const DeploymentParams& params, uint64_t run_seed);

// ---- scenario probes -------------------------------------------------------

// Key-compromise impersonation: the adversary holds every secret the drone
// holds and tries to walk a fresh drone session to Confirmed by forging the
// server's messages. Expected to die at the authorization proof.
struct KciOutcome {
    bool accepted_msg4 = false;   // forged init relay accepted (known weakness
                                  // of a compromised static key)
    bool drone_confirmed = false;
    Reject reason = Reject::None;
};
KciOutcome kci_probe(const DeploymentParams& params, uint64_t seed);

// Drone–server collusion against the user: the adversary gets both static
// secrets plus the full transcript and tries (a) recovering the user's
// long-term secret by guessing, (b) forging the user's identity binder for
// a fresh ephemeral. Both rates must be zero.
struct CollusionOutcome {
    uint64_t secret_trials = 0;
    uint64_t secret_hits = 0;
    uint64_t binder_trials = 0;
    uint64_t binder_accepted = 0;
};
CollusionOutcome collusion_probe(const DeploymentParams& params, uint64_t seed,
                                 uint64_t trials = 256);

}  // namespace zaps::sim
