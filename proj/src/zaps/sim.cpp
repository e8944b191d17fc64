#include "zaps/sim.hpp"

#include "zaps/stats.hpp"

#include <cstring>
#include <queue>
#include <sstream>

namespace zaps::sim {

using proto::DroneAgent;
using proto::ServerCore;
using proto::UserAgent;
using proto::reject_bucket;
using wire::MsgType;

void validate_config(const SimConfig& cfg) {
    if (cfg.uavs < 1 || cfg.uavs > 1000) throw std::invalid_argument("uavs out of [1,1000]");
    if (cfg.loss < 0.0 || cfg.loss > 1.0) throw std::invalid_argument("loss out of [0,1]");
    if (cfg.delay_min_us > cfg.delay_max_us) throw std::invalid_argument("delay bounds");
    if (cfg.sessions_per_uav < 1) throw std::invalid_argument("sessions_per_uav");
    if (cfg.period_ms < 1) throw std::invalid_argument("period_ms");
    if (cfg.waypoint_mix.empty()) throw std::invalid_argument("waypoint_mix empty");
    for (uint32_t n : cfg.waypoint_mix) {
        if (!snark::valid_waypoint_count(n)) throw std::invalid_argument("waypoint_mix entry");
    }
}

SimConfig sweep_point(SimConfig base, uint32_t uavs, uint32_t total_sessions_target) {
    base.uavs = uavs;
    uint32_t per = total_sessions_target / std::max(1u, uavs);
    base.sessions_per_uav = std::max(4u, per);
    return base;
}

std::string swarm_csv_header() {
    return "uavs,seed,sessions,confirmed,mean_handling_ms,mean_proof_ms,mean_session_ms,"
           "bytes_per_uav,bytes_total\r\n";
}

std::string swarm_csv_row(const SwarmMetrics& m, uint64_t seed) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << m.uavs << ',' << seed << ',' << m.sessions << ',' << m.confirmed << ','
       << m.mean_handling_ms << ',' << m.mean_proof_ms << ',' << m.mean_session_ms << ','
       << m.bytes_per_uav << ',' << m.bytes_total << "\r\n";
    return os.str();
}

namespace {

enum Dest : int { kServer = 0, kUser = 1, kDrone = 2 };
enum JobType : int { kJobInit = 0, kJobProof = 1, kJobRelay = 2, kJobFinal = 3 };

// How a frame entered the channel: sent by an honest endpoint, substituted
// in place of an honest frame, or fabricated outright by the adversary.
enum class Origin { Honest, Subst, Inject };

struct Ev {
    uint64_t t = 0;
    uint64_t seq = 0;
    int kind = 0;  // 0 start, 1 deliver, 2 job-done, 3 drop
    uint32_t sess = 0;
    int dest = kServer;
    uint8_t tag = 0;
    int job = 0;
    bool injected = false;
    Bytes payload, aux;
    uint32_t sender_ts = 0;  // ms
};

struct EvLater {
    bool operator()(const Ev& a, const Ev& b) const {
        return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
};

struct LiveSession {
    uint32_t pair = 0;
    std::optional<UserAgent> user;
    std::optional<DroneAgent> drone;
    std::optional<Rng> urng, drng;

    std::optional<wire::Msg1> m1;
    std::optional<wire::Msg2> m2;
    uint32_t ts1 = 0, ts2 = 0;
    Bytes pending, pending_aux;  // payload parked for the scheduled server job
    uint32_t pending_ts = 0;
    Bytes early6;  // countersign that overtook the drone's init relay
    uint32_t early6_ts = 0;

    double handling_us = 0, proof_us = 0, session_us = 0;
    uint64_t bytes = 0;
    bool done = false, confirmed = false;
    std::string abort_bucket;
    bool touched = false;  // the adversary rewrote this session's traffic
};

// One user/drone fleet sharing a single authority, driven by a discrete
// event queue. Virtual time is in microseconds; wire timestamps carry the
// millisecond truncation. The server is a single FIFO worker: a job begins
// at max(arrival, previous completion) and the session is charged the full
// span from arrival to completion, queueing wait included.
class Swarm {
public:
    explicit Swarm(const SimConfig& cfg)
        : cfg_(cfg),
          root_(cfg.seed),
          chan_(root_.child("channel")),
          adv_rng_(root_.child("adversary")),
          srv_job_rng_(root_.child("srv-jobs")) {
        validate_config(cfg);
        const ec::Curve& curve = ec::curve_by_id(ec::CurveId::Secp256k1);
        Rng setup = root_.child("setup");
        ps_ = std::make_shared<snark::ProofSystem>(curve, setup.u64());
        Rng srv = root_.child("server");
        server_.emplace(ps_, srv, cfg.window_ms);

        for (uint32_t i = 0; i < cfg.uavs; ++i) {
            Rng pr = root_.child("pair-" + std::to_string(i));
            kex::KeyPair ult = kex::gen_keypair(curve, pr);
            kex::KeyPair dlt = kex::gen_keypair(curve, pr);
            proto::Registration ru = server_->register_user(
                "user-" + std::to_string(i), "pw-" + std::to_string(i), ult.pub);
            proto::Registration rd =
                server_->register_drone("drone-" + std::to_string(i), dlt.pub);

            uint32_t n = cfg.waypoint_mix[i % cfg.waypoint_mix.size()];
            snark::Geofence fence{1000, 3000, 1000, 3000};
            snark::FlightPath path;
            for (uint32_t w = 0; w < n; ++w) {
                path.points.push_back({static_cast<uint16_t>(1000 + pr.below(2001)),
                                       static_cast<uint16_t>(1000 + pr.below(2001))});
            }
            ec::Scalar r_u = curve.random_nonzero_scalar(pr);
            ec::Scalar r_d = curve.random_nonzero_scalar(pr);
            snark::Statement st_u = ps_->make_statement(path, fence, r_u, ult.pub);
            snark::Statement st_d = ps_->make_statement(path, fence, r_d, dlt.pub);
            size_t mi = server_->file_mission(ru.alias, rd.alias, st_u, st_d, cfg.backend, pr);
            const snark::Statement& st_s = server_->mission(mi).st_server;

            users_.push_back(UserAgent::Config{"user-" + std::to_string(i),
                                               "pw-" + std::to_string(i), ult, ru,
                                               server_->static_pub(), path, r_u, st_u, st_s,
                                               st_d, cfg.backend, cfg.window_ms});
            drones_.push_back(DroneAgent::Config{"drone-" + std::to_string(i), dlt, rd,
                                                 server_->static_pub(), path, r_d, st_u, st_s,
                                                 st_d, cfg.backend, cfg.window_ms});
            waypoints_.push_back(n);
        }
    }

    SwarmMetrics run() {
        const uint64_t period = uint64_t(cfg_.period_ms) * 1000;
        const uint64_t stagger = period / cfg_.uavs;
        sessions_.resize(size_t(cfg_.uavs) * cfg_.sessions_per_uav);
        for (uint32_t j = 0; j < cfg_.sessions_per_uav; ++j) {
            for (uint32_t i = 0; i < cfg_.uavs; ++i) {
                uint32_t s = j * cfg_.uavs + i;
                sessions_[s].pair = i;
                Ev ev;
                ev.t = j * period + i * stagger;
                ev.seq = seq_++;
                ev.kind = 0;
                ev.sess = s;
                push(std::move(ev));
            }
        }
        while (!q_.empty()) {
            Ev ev = q_.top();
            q_.pop();
            now_ = ev.t;
            log_event(ev);
            switch (ev.kind) {
                case 0: start_session(ev); break;
                case 1: deliver(ev); break;
                case 2: job_done(ev); break;
                case 3: break;  // drop, logged only
            }
        }
        return finalize();
    }

private:
    // ---- plumbing ----

    void push(Ev ev) { q_.push(std::move(ev)); }

    void log_event(const Ev& ev) {
        static const char* kNames[] = {"start", "deliver", "job", "drop"};
        log_.u32(uint32_t(ev.t >> 32)).u32(uint32_t(ev.t));
        log_.u32(uint32_t(ev.seq));
        log_ << std::string_view(kNames[ev.kind]);
        Bytes tb{ev.tag, uint8_t(ev.injected)};
        log_ << tb;
        log_.u32(ev.sess);
        if (cfg_.record_events) {
            recorded_.push_back({ev.t, ev.seq, kNames[ev.kind], ev.tag, ev.sess});
        }
    }

    uint32_t ms(uint64_t us) const { return uint32_t(us / 1000); }

    uint64_t channel_delay() {
        return cfg_.delay_min_us +
               chan_.below(uint64_t(cfg_.delay_max_us) - cfg_.delay_min_us + 1);
    }

    // Enters a frame into the channel, applying the adversary and loss.
    // Injected frames skip both: the adversary places them directly at the
    // receiver's edge. For those, stamp_ts is the claimed transport time —
    // the recorded original's, since any later stamp would break the MACs.
    void emit(uint32_t sess, uint8_t tag, int dest, Bytes payload, Bytes aux, uint64_t t_send,
              Origin origin = Origin::Honest, uint32_t stamp_ts = 0) {
        emitted_++;
        if (origin == Origin::Honest && adv_.kind != AdversaryKind::None) {
            if (adversary_touch(sess, tag, dest, payload, aux, t_send)) return;
        }
        if (origin == Origin::Inject) {
            injected_++;
            Ev ev;
            ev.t = t_send + channel_delay();
            ev.seq = seq_++;
            ev.kind = 1;
            ev.sess = sess;
            ev.dest = dest;
            ev.tag = tag;
            ev.injected = true;
            ev.payload = std::move(payload);
            ev.aux = std::move(aux);
            ev.sender_ts = stamp_ts;
            push(std::move(ev));
            return;
        }
        if (cfg_.loss > 0 && chan_.bernoulli(cfg_.loss)) {
            dropped_++;
            Ev ev;
            ev.t = t_send + channel_delay();
            ev.seq = seq_++;
            ev.kind = 3;
            ev.sess = sess;
            ev.tag = tag;
            push(std::move(ev));
            return;
        }
        Ev ev;
        ev.t = t_send + channel_delay();
        ev.seq = seq_++;
        ev.kind = 1;
        ev.sess = sess;
        ev.dest = dest;
        ev.tag = tag;
        ev.payload = std::move(payload);
        ev.aux = std::move(aux);
        ev.sender_ts = ms(t_send);
        push(std::move(ev));
    }

    // Returns true when the original frame was consumed (intercepted). A
    // substitute then takes the original's place in the session, so its
    // rejection is the session's failure — not a deflected injection.
    bool adversary_touch(uint32_t sess, uint8_t tag, int dest, Bytes& payload, Bytes& aux,
                         uint64_t t_send) {
        const ec::Curve& curve = ec::curve_by_id(ec::CurveId::Secp256k1);
        switch (adv_.kind) {
            case AdversaryKind::Mitm:
                if (adv_.passive) {
                    observed_++;
                    return false;
                }
                if (tag == 1 || tag == 2) {
                    // Swap the ephemeral for one whose discrete log the
                    // adversary knows. Binder and token are left alone — no
                    // registered secret is available to redo them.
                    kex::KeyPair ak = kex::gen_keypair(curve, adv_rng_);
                    std::array<uint8_t, 32> ex = curve.encode_x(ak.pub);
                    std::memcpy(payload.data(), ex.data(), 32);  // e leads both hellos
                    intercepted_++;
                    sessions_[sess].touched = true;
                    emit(sess, tag, dest, std::move(payload), std::move(aux), t_send,
                         Origin::Subst);
                    return true;
                }
                return false;
            case AdversaryKind::Replay:
                if (tag == adv_.target_tag) {
                    // Record the frame and re-present an exact copy later.
                    // The copy keeps the original send timestamp — a recorder
                    // cannot re-stamp a MAC-covered clock value.
                    observed_++;
                    Bytes copy = payload;
                    Bytes copy_aux = aux;
                    emit(sess, tag, dest, std::move(copy), std::move(copy_aux),
                         t_send + uint64_t(adv_.delay_ms) * 1000, Origin::Inject, ms(t_send));
                }
                return false;
            case AdversaryKind::TamperBit:
                if (tag == adv_.target_tag) {
                    uint32_t bit = adv_.bit % uint32_t(payload.size() * 8);
                    payload[bit / 8] ^= uint8_t(1u << (bit % 8));
                    intercepted_++;
                    sessions_[sess].touched = true;
                    emit(sess, tag, dest, std::move(payload), std::move(aux), t_send,
                         Origin::Subst);
                    return true;
                }
                return false;
            case AdversaryKind::Impersonate: {
                uint8_t want = adv_.target_role == Role::User ? 1 : 2;
                if (tag == want && !impersonated_) {
                    impersonated_ = true;
                    // Forge the hello outright: fresh adversary ephemeral,
                    // fabricated identity binder (no enrollment secret).
                    kex::KeyPair ak = kex::gen_keypair(curve, adv_rng_);
                    std::array<uint8_t, 32> ex = curve.encode_x(ak.pub);
                    std::memcpy(payload.data(), ex.data(), 32);
                    Digest32 junk = adv_rng_.digest32();
                    std::memcpy(payload.data() + 48, junk.data(), 32);  // binder field
                    intercepted_++;
                    sessions_[sess].touched = true;
                    emit(sess, tag, dest, std::move(payload), std::move(aux), t_send,
                         Origin::Subst);
                    return true;
                }
                return false;
            }
            case AdversaryKind::None: return false;
        }
        return false;
    }

    void abort_session(LiveSession& s, Reject r) {
        if (s.done) return;
        s.done = true;
        s.abort_bucket = reject_bucket(r);
    }

    // ---- session steps ----

    void start_session(const Ev& ev) {
        LiveSession& s = sessions_[ev.sess];
        const std::string tag = std::to_string(ev.sess);
        s.urng = root_.child("u" + tag);
        s.drng = root_.child("d" + tag);
        s.user.emplace(ps_, users_[s.pair]);
        s.drone.emplace(ps_, drones_[s.pair]);

        uint64_t tu = ev.t + cfg_.costs.user_kex_us;
        auto m1 = s.user->begin(ms(tu), *s.urng);
        if (!m1.ok()) return abort_session(s, m1.reason);
        s.bytes += wire::kMsgSize[0];
        emit(ev.sess, 1, kServer, wire::encode(*m1.value), {}, tu);

        uint64_t td = ev.t + cfg_.costs.drone_kex_us + 500;
        auto m2 = s.drone->begin(ms(td), *s.drng);
        if (!m2.ok()) return abort_session(s, m2.reason);
        s.bytes += wire::kMsgSize[1];
        emit(ev.sess, 2, kServer, wire::encode(*m2.value), {}, td);
    }

    void schedule_job(uint32_t sess, int job, uint64_t arrival) {
        uint64_t cost = 0;
        switch (job) {
            case kJobInit: cost = cfg_.costs.server_init_us; break;
            case kJobProof:
                cost = cfg_.costs.server_verify_us + cfg_.costs.server_prove_us;
                break;
            case kJobRelay: cost = cfg_.costs.server_relay_us; break;
            case kJobFinal: cost = cfg_.costs.server_final_us; break;
        }
        uint64_t begin = std::max(arrival, busy_until_);
        uint64_t end = begin + cost;
        busy_until_ = end;
        LiveSession& s = sessions_[sess];
        double spent = double(end - arrival);
        s.handling_us += spent;
        (job == kJobProof ? s.proof_us : s.session_us) += spent;
        Ev ev;
        ev.t = end;
        ev.seq = seq_++;
        ev.kind = 2;
        ev.sess = sess;
        ev.job = job;
        push(std::move(ev));
    }

    void deliver(const Ev& ev) {
        delivered_++;
        if (ev.injected) return handle_injected(ev);
        LiveSession& s = sessions_[ev.sess];
        switch (ev.tag) {
            case 1: {
                auto m = wire::decode_msg1(ev.payload);
                if (!m) return abort_session(s, Reject::Malformed);
                s.m1 = *m;
                s.ts1 = ev.sender_ts;
                if (s.m2) schedule_job(ev.sess, kJobInit, ev.t);
                return;
            }
            case 2: {
                auto m = wire::decode_msg2(ev.payload);
                if (!m) return abort_session(s, Reject::Malformed);
                s.m2 = *m;
                s.ts2 = ev.sender_ts;
                if (s.m1) schedule_job(ev.sess, kJobInit, ev.t);
                return;
            }
            case 3: {
                auto m = wire::decode_msg3(ev.payload);
                if (!m) return abort_session(s, Reject::Malformed);
                auto r = s.user->on_msg3(*m, ev.sender_ts, ms(ev.t));
                if (!r.ok()) return abort_session(s, r.reason);
                uint64_t te = ev.t + cfg_.costs.user_prove_us;
                auto m5 = s.user->prove_path(ms(te), *s.urng);
                if (!m5.ok()) return abort_session(s, m5.reason);
                s.bytes += wire::kMsgSize[4];
                if (cfg_.extended_mode) {
                    // Per-waypoint sub-proof plus its commitment, carried out
                    // of band next to the fixed-size route proof.
                    s.bytes += uint64_t(waypoints_[s.pair]) * (128 + 32);
                }
                emit(ev.sess, 5, kServer, wire::encode(*m5.value), {}, te);
                return;
            }
            case 4: {
                auto m = wire::decode_msg4(ev.payload);
                if (!m) return abort_session(s, Reject::Malformed);
                auto r = s.drone->on_msg4(*m, ev.sender_ts, ms(ev.t));
                if (!r.ok()) return abort_session(s, r.reason);
                if (!s.early6.empty()) {
                    Bytes parked = std::move(s.early6);
                    s.early6.clear();
                    drone_msg6(ev.sess, parked, s.early6_ts, ev.t);
                }
                return;
            }
            case 5: {
                s.pending = ev.payload;
                s.pending_ts = ev.sender_ts;
                schedule_job(ev.sess, kJobProof, ev.t);
                return;
            }
            case 6:
                drone_msg6(ev.sess, ev.payload, ev.sender_ts, ev.t);
                return;
            case 7:
                if (ev.dest == kServer) {
                    s.pending = ev.payload;
                    s.pending_aux = ev.aux;
                    s.pending_ts = ev.sender_ts;
                    schedule_job(ev.sess, kJobRelay, ev.t);
                    return;
                }
                user_msg7(ev);
                return;
            case 8: {
                s.pending = ev.payload;
                s.pending_ts = ev.sender_ts;
                schedule_job(ev.sess, kJobFinal, ev.t);
                return;
            }
            default: abort_session(s, Reject::Malformed);
        }
    }

    // An adversary-fabricated frame reaches the live receiver. Whatever the
    // receiver answers, the honest session is not charged: the verdict only
    // feeds the injection counters.
    void handle_injected(const Ev& ev) {
        LiveSession& s = sessions_[ev.sess];
        bool rejected = true;
        switch (ev.tag) {
            case 1: {
                auto m = wire::decode_msg1(ev.payload);
                if (m && s.m2) {
                    Rng r = srv_job_rng_.child("inj" + std::to_string(ev.seq));
                    rejected =
                        !server_->process_init(*m, ev.sender_ts, *s.m2, s.ts2, ms(ev.t), r).ok();
                }
                break;
            }
            case 2: {
                auto m = wire::decode_msg2(ev.payload);
                if (m && s.m1) {
                    Rng r = srv_job_rng_.child("inj" + std::to_string(ev.seq));
                    rejected =
                        !server_->process_init(*s.m1, s.ts1, *m, ev.sender_ts, ms(ev.t), r).ok();
                }
                break;
            }
            case 3: {
                auto m = wire::decode_msg3(ev.payload);
                if (m && s.user) rejected = !s.user->on_msg3(*m, ev.sender_ts, ms(ev.t)).ok();
                break;
            }
            case 4: {
                auto m = wire::decode_msg4(ev.payload);
                if (m && s.drone) rejected = !s.drone->on_msg4(*m, ev.sender_ts, ms(ev.t)).ok();
                break;
            }
            case 5: {
                auto m = wire::decode_msg5(ev.payload);
                if (m) {
                    Rng r = srv_job_rng_.child("inj" + std::to_string(ev.seq));
                    rejected = !server_->process_proof(*m, ev.sender_ts, ms(ev.t), r).ok();
                }
                break;
            }
            case 6: {
                auto m = wire::decode_msg6(ev.payload);
                if (m && s.drone) {
                    Rng r = srv_job_rng_.child("inj" + std::to_string(ev.seq));
                    rejected = !s.drone->on_msg6(*m, ev.sender_ts, ms(ev.t), r).ok();
                }
                break;
            }
            case 7: {
                auto m = wire::decode_msg7(ev.payload);
                if (m) {
                    auto relay = server_->relay_msg7(*m);
                    if (relay.ok() && s.user) {
                        rejected =
                            !s.user->on_msg7(*m, s.pending_aux, ev.sender_ts, ms(ev.t)).ok();
                    }
                }
                break;
            }
            case 8: {
                auto m = wire::decode_msg8(ev.payload);
                if (m) rejected = !server_->process_final(*m, ev.sender_ts, ms(ev.t)).ok();
                break;
            }
            default: break;
        }
        if (rejected) inject_rejected_++;
    }

    void drone_msg6(uint32_t sess, const Bytes& payload, uint32_t sender_ts, uint64_t t_now) {
        LiveSession& s = sessions_[sess];
        auto m = wire::decode_msg6(payload);
        if (!m) return abort_session(s, Reject::Malformed);
        // The reply token is stamped with the drone's send time, so the
        // handler runs on the post-proving clock.
        uint64_t te = t_now + cfg_.costs.drone_prove_us;
        auto r = s.drone->on_msg6(*m, sender_ts, ms(te), *s.drng);
        if (!r.ok()) {
            // The countersign can overtake the init relay on the drone leg
            // (independent channel delays). Out-of-phase frames are refused
            // without side effects, so park it and retry once msg4 lands.
            if (r.reason == Reject::WrongPhase && s.drone->phase() == Phase::InitSent) {
                s.early6 = payload;
                s.early6_ts = sender_ts;
                return;
            }
            return abort_session(s, r.reason);
        }
        s.bytes += wire::kMsgSize[6];
        emit(sess, 7, kServer, wire::encode(r.value->msg), r.value->aux, te);
    }

    void user_msg7(const Ev& ev) {
        LiveSession& s = sessions_[ev.sess];
        auto m = wire::decode_msg7(ev.payload);
        if (!m) return abort_session(s, Reject::Malformed);
        uint64_t te = ev.t + cfg_.costs.user_final_us;
        auto r = s.user->on_msg7(*m, ev.aux, ev.sender_ts, ms(te));
        if (!r.ok()) return abort_session(s, r.reason);
        s.bytes += wire::kMsgSize[7];
        emit(ev.sess, 8, kServer, wire::encode(*r.value), {}, te);
    }

    void job_done(const Ev& ev) {
        LiveSession& s = sessions_[ev.sess];
        switch (ev.job) {
            case kJobInit: {
                Rng r = srv_job_rng_.child("init" + std::to_string(ev.sess));
                auto out = server_->process_init(*s.m1, s.ts1, *s.m2, s.ts2, ms(ev.t), r);
                if (!out.ok()) return abort_session(s, out.reason);
                s.bytes += wire::kMsgSize[2] + wire::kMsgSize[3];
                emit(ev.sess, 3, kUser, wire::encode(out.value->first), {}, ev.t);
                emit(ev.sess, 4, kDrone, wire::encode(out.value->second), {}, ev.t);
                return;
            }
            case kJobProof: {
                auto m5 = wire::decode_msg5(s.pending);
                if (!m5) return abort_session(s, Reject::Malformed);
                Rng r = srv_job_rng_.child("proof" + std::to_string(ev.sess));
                auto out = server_->process_proof(*m5, s.pending_ts, ms(ev.t), r);
                if (!out.ok()) return abort_session(s, out.reason);
                s.bytes += wire::kMsgSize[5];
                emit(ev.sess, 6, kDrone, wire::encode(*out.value), {}, ev.t);
                return;
            }
            case kJobRelay: {
                auto m7 = wire::decode_msg7(s.pending);
                if (!m7) return abort_session(s, Reject::Malformed);
                auto out = server_->relay_msg7(*m7);
                if (!out.ok()) return abort_session(s, out.reason);
                // Forward on a fresh channel leg; the frame keeps the drone's
                // sending timestamp, and its bytes were already counted.
                Ev fwd;
                fwd.t = ev.t + channel_delay();
                fwd.seq = seq_++;
                fwd.kind = 1;
                fwd.sess = ev.sess;
                fwd.dest = kUser;
                fwd.tag = 7;
                fwd.payload = s.pending;
                fwd.aux = s.pending_aux;
                fwd.sender_ts = s.pending_ts;
                emitted_++;
                push(std::move(fwd));
                return;
            }
            case kJobFinal: {
                auto m8 = wire::decode_msg8(s.pending);
                if (!m8) return abort_session(s, Reject::Malformed);
                auto out = server_->process_final(*m8, s.pending_ts, ms(ev.t));
                if (!out.ok()) return abort_session(s, out.reason);
                s.done = true;
                s.confirmed = true;
                return;
            }
        }
    }

    SwarmMetrics finalize() {
        SwarmMetrics m;
        m.uavs = cfg_.uavs;
        m.sessions = uint32_t(sessions_.size());
        std::vector<double> handling, proof, rest;
        for (LiveSession& s : sessions_) {
            m.bytes_total += s.bytes;
            if (s.confirmed) {
                m.confirmed++;
                if (s.touched) m.confirmed_with_known_key++;
                handling.push_back(s.handling_us / 1000.0);
                proof.push_back(s.proof_us / 1000.0);
                rest.push_back(s.session_us / 1000.0);
            } else {
                m.aborted[s.done ? s.abort_bucket : "lost"]++;
            }
        }
        if (!handling.empty()) {
            m.mean_handling_ms = stats::mean(handling);
            m.mean_proof_ms = stats::mean(proof);
            m.mean_session_ms = stats::mean(rest);
        }
        m.bytes_per_uav = double(m.bytes_total) / double(cfg_.uavs);
        m.emitted = emitted_;
        m.delivered = delivered_;
        m.dropped = dropped_;
        m.intercepted = intercepted_;
        m.injected = injected_;
        m.inject_rejected = inject_rejected_;
        m.observed = observed_;
        m.nonces_unique = server_->nonces_unique();
        m.end_us = now_;
        m.event_log_hash = to_hex(log_.digest());
        m.events = std::move(recorded_);
        return m;
    }

    SimConfig cfg_;
    Rng root_;
    Rng chan_, adv_rng_, srv_job_rng_;
    Adversary adv_ = cfg_.adversary;
    std::shared_ptr<snark::ProofSystem> ps_;
    std::optional<ServerCore> server_;
    std::vector<UserAgent::Config> users_;
    std::vector<DroneAgent::Config> drones_;
    std::vector<uint32_t> waypoints_;
    std::vector<LiveSession> sessions_;
    std::priority_queue<Ev, std::vector<Ev>, EvLater> q_;
    uint64_t seq_ = 0, now_ = 0, busy_until_ = 0;
    uint64_t emitted_ = 0, delivered_ = 0, dropped_ = 0, intercepted_ = 0, injected_ = 0,
             inject_rejected_ = 0, observed_ = 0;
    bool impersonated_ = false;
    HashWriter log_;
    std::vector<RecordedEvent> recorded_;
};

}  // namespace

SwarmMetrics run_swarm(const SimConfig& cfg) {
    Swarm s(cfg);
    return s.run();
}

// ---- HonestRun -------------------------------------------------------------

HonestRun::HonestRun(const DeploymentParams& params, uint64_t run_seed)
    : dep_(proto::make_deployment(params)) {
    Rng rng(run_seed);
    Rng ur = rng.child("user"), dr = rng.child("drone"), sr = rng.child("srv");
    UserAgent user(dep_.ps, dep_.user_cfg);
    DroneAgent drone(dep_.ps, dep_.drone_cfg);
    ServerCore& server = *dep_.server;

    uint32_t t = 0;
    auto m1 = user.begin(t, ur);
    auto m2 = drone.begin(t, dr);
    if (!m1.ok() || !m2.ok()) return;
    payloads_[0] = wire::encode(*m1.value);
    payloads_[1] = wire::encode(*m2.value);
    sent_ts_[0] = sent_ts_[1] = t;
    ts2_ = t;

    srv_pre_init_ = server;
    t = 3;
    recv_now_[0] = recv_now_[1] = t;
    auto p34 = server.process_init(*m1.value, 0, *m2.value, 0, t, sr);
    if (!p34.ok()) return;
    payloads_[2] = wire::encode(p34.value->first);
    payloads_[3] = wire::encode(p34.value->second);
    sent_ts_[2] = sent_ts_[3] = t;

    user_pre3_ = user;
    drone_pre4_ = drone;
    t = 6;
    recv_now_[2] = recv_now_[3] = t;
    if (!user.on_msg3(p34.value->first, 3, t).ok()) return;
    if (!drone.on_msg4(p34.value->second, 3, t).ok()) return;

    t = 9;
    auto m5 = user.prove_path(t, ur);
    if (!m5.ok()) return;
    payloads_[4] = wire::encode(*m5.value);
    sent_ts_[4] = t;

    srv_pre5_ = server;
    t = 12;
    recv_now_[4] = t;
    auto m6 = server.process_proof(*m5.value, 9, t, sr);
    if (!m6.ok()) return;
    payloads_[5] = wire::encode(*m6.value);
    sent_ts_[5] = t;

    drone_pre6_ = drone;
    t = 15;
    recv_now_[5] = t;
    auto m7 = drone.on_msg6(*m6.value, 12, t, dr);
    if (!m7.ok()) return;
    payloads_[6] = wire::encode(m7.value->msg);
    sent_ts_[6] = t;
    aux7_ = m7.value->aux;

    srv_pre7_ = server;
    user_pre7_ = user;
    t = 18;
    recv_now_[6] = t;
    if (!server.relay_msg7(m7.value->msg).ok()) return;
    auto m8 = user.on_msg7(m7.value->msg, aux7_, 15, t + 3);
    if (!m8.ok()) return;
    payloads_[7] = wire::encode(*m8.value);
    sent_ts_[7] = t + 3;

    srv_pre8_ = server;
    t = 24;
    recv_now_[7] = t;
    if (!server.process_final(*m8.value, 21, t).ok()) return;
    end_ms_ = t;
    confirmed_ = true;
    srv_post_ = server;
    user_post_ = user;
    drone_post_ = drone;
}

namespace {

template <typename T>
HonestRun::Outcome from_result(const proto::Result<T>& r) {
    HonestRun::Outcome o;
    o.rejected = !r.ok();
    o.reason = r.reason;
    o.bucket = o.rejected ? reject_bucket(r.reason) : "";
    return o;
}

HonestRun::Outcome malformed_outcome() {
    HonestRun::Outcome o;
    o.rejected = true;
    o.reason = Reject::Malformed;
    o.bucket = reject_bucket(Reject::Malformed);
    return o;
}

}  // namespace

HonestRun::Outcome HonestRun::dispatch(size_t msg_idx, const Bytes& payload, uint32_t frame_ts,
                                       uint32_t now) const {
    Rng trial_rng(0xda7a5eed);
    switch (msg_idx) {
        case 1: {
            auto m = wire::decode_msg1(payload);
            auto m2 = wire::decode_msg2(payloads_[1]);
            if (!m || !m2) return malformed_outcome();
            ServerCore srv = *srv_pre_init_;
            return from_result(srv.process_init(*m, frame_ts, *m2, ts2_, now, trial_rng));
        }
        case 2: {
            auto m1 = wire::decode_msg1(payloads_[0]);
            auto m = wire::decode_msg2(payload);
            if (!m1 || !m) return malformed_outcome();
            ServerCore srv = *srv_pre_init_;
            return from_result(srv.process_init(*m1, sent_ts_[0], *m, frame_ts, now, trial_rng));
        }
        case 3: {
            auto m = wire::decode_msg3(payload);
            if (!m) return malformed_outcome();
            UserAgent u = *user_pre3_;
            return from_result(u.on_msg3(*m, frame_ts, now));
        }
        case 4: {
            auto m = wire::decode_msg4(payload);
            if (!m) return malformed_outcome();
            DroneAgent d = *drone_pre4_;
            return from_result(d.on_msg4(*m, frame_ts, now));
        }
        case 5: {
            auto m = wire::decode_msg5(payload);
            if (!m) return malformed_outcome();
            ServerCore srv = *srv_pre5_;
            return from_result(srv.process_proof(*m, frame_ts, now, trial_rng));
        }
        case 6: {
            auto m = wire::decode_msg6(payload);
            if (!m) return malformed_outcome();
            DroneAgent d = *drone_pre6_;
            return from_result(d.on_msg6(*m, frame_ts, now, trial_rng));
        }
        case 7: {
            auto m = wire::decode_msg7(payload);
            if (!m) return malformed_outcome();
            // The relay rules first; if it forwards, the user rules on the
            // same (possibly modified) bytes.
            ServerCore srv = *srv_pre7_;
            auto relay = srv.relay_msg7(*m);
            if (!relay.ok()) return from_result(relay);
            UserAgent u = *user_pre7_;
            return from_result(u.on_msg7(*m, aux7_, frame_ts, now));
        }
        case 8: {
            auto m = wire::decode_msg8(payload);
            if (!m) return malformed_outcome();
            ServerCore srv = *srv_pre8_;
            return from_result(srv.process_final(*m, frame_ts, now));
        }
        default: throw std::invalid_argument("msg_idx");
    }
}

HonestRun::Outcome HonestRun::deliver(size_t msg_idx, const Bytes& payload) const {
    return dispatch(msg_idx, payload, sent_ts_.at(msg_idx - 1), recv_now_.at(msg_idx - 1));
}

HonestRun::Outcome HonestRun::deliver_control(size_t msg_idx) const {
    return deliver(msg_idx, payloads_.at(msg_idx - 1));
}

HonestRun::Outcome HonestRun::replay(size_t msg_idx, uint32_t delay_ms) const {
    uint32_t now = end_ms_ + delay_ms;
    uint32_t frame_ts = sent_ts_.at(msg_idx - 1);
    Rng trial_rng(0x5eed0f);
    Rng fresh(0xfee1);
    switch (msg_idx) {
        case 1: {
            // Replayed user hello paired with a fresh drone hello, as if the
            // honest drone started a new session around the replay.
            auto m1 = wire::decode_msg1(payloads_[0]);
            DroneAgent d(dep_.ps, dep_.drone_cfg);
            auto m2 = d.begin(now, fresh);
            ServerCore srv = *srv_post_;
            return from_result(srv.process_init(*m1, frame_ts, *m2.value, now, now, trial_rng));
        }
        case 2: {
            auto m2 = wire::decode_msg2(payloads_[1]);
            UserAgent u(dep_.ps, dep_.user_cfg);
            auto m1 = u.begin(now, fresh);
            ServerCore srv = *srv_post_;
            return from_result(srv.process_init(*m1.value, now, *m2, frame_ts, now, trial_rng));
        }
        case 3: {
            auto m = wire::decode_msg3(payloads_[2]);
            UserAgent u = *user_post_;
            return from_result(u.on_msg3(*m, frame_ts, now));
        }
        case 4: {
            auto m = wire::decode_msg4(payloads_[3]);
            DroneAgent d = *drone_post_;
            return from_result(d.on_msg4(*m, frame_ts, now));
        }
        case 5: {
            auto m = wire::decode_msg5(payloads_[4]);
            ServerCore srv = *srv_post_;
            return from_result(srv.process_proof(*m, frame_ts, now, trial_rng));
        }
        case 6: {
            auto m = wire::decode_msg6(payloads_[5]);
            DroneAgent d = *drone_post_;
            return from_result(d.on_msg6(*m, frame_ts, now, trial_rng));
        }
        case 7: {
            auto m = wire::decode_msg7(payloads_[6]);
            ServerCore srv = *srv_post_;
            auto relay = srv.relay_msg7(*m);
            if (!relay.ok()) return from_result(relay);
            UserAgent u = *user_post_;
            return from_result(u.on_msg7(*m, aux7_, frame_ts, now));
        }
        case 8: {
            auto m = wire::decode_msg8(payloads_[7]);
            ServerCore srv = *srv_post_;
            return from_result(srv.process_final(*m, frame_ts, now));
        }
        default: throw std::invalid_argument("msg_idx");
    }
}

// ---- tamper sweep ----------------------------------------------------------

TamperSweep run_tamper_sweep(const DeploymentParams& params, uint64_t run_seed) {
    HonestRun hr(params, run_seed);
    if (!hr.confirmed()) throw std::runtime_error("tamper sweep: honest run failed");

    // Byte spans of the zk proof envelopes inside each payload.
    auto in_proof_field = [](size_t msg, size_t byte) {
        switch (msg) {
            case 5: return byte >= 80 && byte < 208;
            case 6: return byte >= 128 && byte < 256;
            case 7: return byte >= 80 && byte < 208;
            default: return false;
        }
    };

    TamperSweep sw;
    for (size_t msg = 1; msg <= 8; ++msg) {
        sw.controls++;
        if (!hr.deliver_control(msg).rejected) sw.controls_accepted++;
        const Bytes& orig = hr.payload(msg);
        for (size_t bit = 0; bit < orig.size() * 8; ++bit) {
            Bytes mod = orig;
            mod[bit / 8] ^= uint8_t(1u << (bit % 8));
            HonestRun::Outcome o = hr.deliver(msg, mod);
            sw.trials++;
            sw.per_msg_trials[msg - 1]++;
            if (o.rejected) {
                sw.rejected++;
                sw.per_msg_rejected[msg - 1]++;
            }
            sw.buckets[o.rejected ? o.bucket : "accepted"]++;
            if (in_proof_field(msg, bit / 8)) {
                sw.proof_buckets[o.rejected ? o.bucket : "accepted"]++;
            }
        }
    }
    return sw;
}

// ---- scenario probes -------------------------------------------------------

KciOutcome kci_probe(const DeploymentParams& params, uint64_t seed) {
    Deployment dep = proto::make_deployment(params);
    const ec::Curve& curve = dep.ps->curve();
    Rng adv(seed);
    DroneAgent drone(dep.ps, dep.drone_cfg);
    Rng dr = adv.child("drone-side");

    KciOutcome out;
    auto m2 = drone.begin(0, dr);
    if (!m2.ok()) return out;

    // Adversary state: everything the drone stores (key compromise), so the
    // server-leg MAC key is derivable for any ephemeral pair it invents.
    const proto::Registration& reg = dep.drone_cfg.reg;
    kex::KeyPair ak = kex::gen_keypair(curve, adv);
    std::array<uint8_t, 32> e_a = curve.encode_x(ak.pub);
    Id16 sid = adv.id16();

    Bytes kbuf;
    append(kbuf, std::string_view("ZAPS-ksd"));
    append(kbuf, reg.smk);
    append(kbuf, e_a);
    append(kbuf, m2.value->e_d);
    append(kbuf, sid);
    Digest32 k_sd = sha256(kbuf);

    wire::Msg4 m4;
    m4.sid = sid;
    m4.did = reg.alias;
    m4.e_u = e_a;
    {
        wire::Msg4 z = m4;
        z.auth = wire::AuthToken{};
        m4.auth = proto::make_token(k_sd, MsgType::M4, wire::encode(z), 1);
    }
    auto r4 = drone.on_msg4(m4, 1, 2);
    out.accepted_msg4 = r4.ok();
    if (!r4.ok()) {
        out.reason = r4.reason;
        return out;
    }

    // Forged authorization: correct public commitment, fabricated envelope.
    // Without the authority's opening there is no way to mint this proof.
    wire::Msg6 m6;
    m6.p_s = curve.encode_x(dep.drone_cfg.st_server.commitment.point);
    m6.i_s = adv.digest32();
    Bytes junk = adv.bytes(m6.proof.size());
    std::memcpy(m6.proof.data(), junk.data(), junk.size());
    {
        wire::Msg6 z = m6;
        z.auth = wire::AuthToken{};
        m6.auth = proto::make_token(k_sd, MsgType::M6, wire::encode(z), 3);
    }
    auto r6 = drone.on_msg6(m6, 3, 4, adv);
    out.reason = r6.reason;
    out.drone_confirmed = drone.phase() == Phase::Confirmed;
    return out;
}

CollusionOutcome collusion_probe(const DeploymentParams& params, uint64_t seed,
                                 uint64_t trials) {
    Deployment dep = proto::make_deployment(params);
    const ec::Curve& curve = dep.ps->curve();
    Rng adv(seed);
    CollusionOutcome out;

    // (a) Long-term secret recovery from the public key, by guessing.
    const ec::CurvePoint& target = dep.user_cfg.longterm.pub;
    for (uint64_t i = 0; i < trials; ++i) {
        ec::Scalar g = curve.random_nonzero_scalar(adv);
        out.secret_trials++;
        if (curve.mul_g(g) == target) out.secret_hits++;
    }

    // (b) Identity-binder forgery for a fresh ephemeral. The colluders hold
    // both static secrets and the whole transcript, but the binder also
    // digests the user's enrollment password, which neither of them has.
    const Id16& rid = dep.user_cfg.reg.alias;
    for (uint64_t i = 0; i < trials; ++i) {
        Rng dr(adv.u64());
        DroneAgent accomplice(dep.ps, dep.drone_cfg);
        auto m2 = accomplice.begin(0, dr);

        kex::KeyPair ak = kex::gen_keypair(curve, adv);
        wire::Msg1 m1;
        m1.e_u = curve.encode_x(ak.pub);
        m1.rid = rid;
        Digest32 guess = adv.digest32();
        Bytes ibuf;
        append(ibuf, std::string_view("ZAPS-i1"));
        append(ibuf, guess);
        append(ibuf, m1.e_u);
        append(ibuf, m1.rid);
        m1.i_u = sha256(ibuf);

        Rng sr(adv.u64());
        out.binder_trials++;
        if (dep.server->process_init(m1, 0, *m2.value, 0, 1, sr).ok()) out.binder_accepted++;
    }
    return out;
}

}  // namespace zaps::sim
